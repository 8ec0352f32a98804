//! The `.ssd` system format and the `.met` annotation format.
//!
//! Both are line oriented. `#` starts a comment. A line holding only one of
//! `objects`, `arrows`, `module` or `metric` opens that section:
//!
//! ```text
//! objects
//!   0 1
//! arrows
//!   sigma : 0 -> 1
//!   compose g f = h        # g ∘ f = h
//! module
//!   e : 0 -> 0             # e: 0 ⇸ 0
//!   lact f m = m2          # f · m = m2
//!   ract m g = m2          # m · g = m2
//! metric
//!   diam 1 1
//!   lip L 1/2
//!   empty 2                # the carrier at 2 is known to be empty
//! ```
//!
//! Identities are implicit and can be referred to as `id[<object>]`. Every
//! composite of two non-identity arrows and every action by a non-identity
//! arrow must be listed.

use std::collections::BTreeMap;
use std::fmt;

use selfsim_core::category::{ArrowId, CategoryBuilder, CategoryReport, FiniteCategory, ObjId};
use selfsim_core::module::{ElemId, Module, ModuleBuilder};
use selfsim_core::rational::{format_rational, parse_rational};
use selfsim_core::recognition::MetricAnnotation;
use selfsim_core::{Rational, SystemDef};

const KEYWORDS: &[&str] = &[
    "objects", "arrows", "module", "metric", "compose", "lact", "ract", "diam", "lip", "empty", ":", "->", "=",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Undeclared,
    Duplicate,
    CompositionGap,
    ActionGap,
    LawViolation,
    Metric,
}

/// A parse failure with a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// Metric annotations together with the objects declared `empty`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricSpec {
    pub annotation: MetricAnnotation,
    pub empty: Vec<bool>,
}

impl MetricSpec {
    pub fn nonempty(&self) -> Vec<bool> {
        self.empty.iter().map(|e| !e).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub system: SystemDef,
    pub metric: Option<MetricSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

fn tokenize(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    pos: Pos {
                        line: line_no,
                        column: code[..s].chars().count() + 1,
                    },
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Objects,
    Arrows,
    Module,
    Metric,
}

fn section_of(word: &str) -> Option<Section> {
    match word {
        "objects" => Some(Section::Objects),
        "arrows" => Some(Section::Arrows),
        "module" => Some(Section::Module),
        "metric" => Some(Section::Metric),
        _ => None,
    }
}

fn diag(pos: Pos, kind: DiagnosticKind, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        line: pos.line,
        column: pos.column,
        kind,
        message: message.into(),
    }
}

#[derive(Default)]
struct MetricDraft {
    header: Pos,
    diam: BTreeMap<ObjId, Rational>,
    lip: BTreeMap<ElemId, Rational>,
    empty: BTreeMap<ObjId, Pos>,
}

#[derive(Default)]
struct Builder {
    cat: CategoryBuilder,
    objects: BTreeMap<String, ObjId>,
    arrows: BTreeMap<String, ArrowId>,
    arrow_pos: BTreeMap<ArrowId, Pos>,
    compose: BTreeMap<(ArrowId, ArrowId), (ArrowId, Pos)>,
    module: ModuleBuilder,
    elements: BTreeMap<String, ElemId>,
    element_ends: Vec<(ObjId, ObjId)>,
    element_pos: Vec<Pos>,
    lact: BTreeMap<(ArrowId, ElemId), (ElemId, Pos)>,
    ract: BTreeMap<(ElemId, ArrowId), (ElemId, Pos)>,
    headers: BTreeMap<Section, Pos>,
    metric: Option<MetricDraft>,
    /// Metric-only parsing against an already built system.
    fixed: bool,
}

/// Position of the first token that does not fit `shape` (`None` matches
/// any name), or just past the line when it is too short.
fn mismatch(toks: &[Token<'_>], shape: &[Option<&str>]) -> Pos {
    for (i, want) in shape.iter().enumerate() {
        match toks.get(i) {
            None => {
                let last = toks[toks.len() - 1];
                return Pos {
                    line: last.pos.line,
                    column: last.pos.column + last.text.chars().count() + 1,
                };
            }
            Some(t) if want.is_some_and(|w| w != t.text) => return t.pos,
            Some(_) => {}
        }
    }
    toks.get(shape.len()).map_or(toks[0].pos, |t| t.pos)
}

const DECL: &[Option<&str>] = &[None, Some(":"), None, Some("->"), None];

fn check_name(tok: Token<'_>) -> Result<(), Diagnostic> {
    if KEYWORDS.contains(&tok.text) {
        return Err(diag(
            tok.pos,
            DiagnosticKind::Syntax,
            format!("`{}` is a keyword and cannot be used as a name", tok.text),
        ));
    }
    Ok(())
}

impl Builder {
    fn from_system(sys: &SystemDef) -> Self {
        let cat = sys.category();
        let module = sys.module();
        let mut b = Builder {
            fixed: true,
            ..Builder::default()
        };
        for a in cat.objects() {
            b.objects.insert(cat.object_name(a).to_string(), a);
        }
        for m in module.ids() {
            b.elements.insert(module.name(m).to_string(), m);
            b.element_ends.push((module.src(m), module.dst(m)));
        }
        b
    }

    fn object(&self, tok: Token<'_>) -> Result<ObjId, Diagnostic> {
        self.objects
            .get(tok.text)
            .copied()
            .ok_or_else(|| diag(tok.pos, DiagnosticKind::Undeclared, format!("undeclared object `{}`", tok.text)))
    }

    fn arrow(&self, tok: Token<'_>) -> Result<ArrowId, Diagnostic> {
        self.arrows
            .get(tok.text)
            .copied()
            .ok_or_else(|| diag(tok.pos, DiagnosticKind::Undeclared, format!("undeclared arrow `{}`", tok.text)))
    }

    fn element(&self, tok: Token<'_>) -> Result<ElemId, Diagnostic> {
        self.elements
            .get(tok.text)
            .copied()
            .ok_or_else(|| diag(tok.pos, DiagnosticKind::Undeclared, format!("undeclared element `{}`", tok.text)))
    }

    fn declare_object(&mut self, tok: Token<'_>) -> Result<(), Diagnostic> {
        check_name(tok)?;
        if self.objects.contains_key(tok.text) {
            return Err(diag(tok.pos, DiagnosticKind::Duplicate, format!("object `{}` declared twice", tok.text)));
        }
        let a = self.cat.object(tok.text);
        self.objects.insert(tok.text.to_string(), a);
        self.arrows.insert(format!("id[{}]", tok.text), self.cat.identity(a));
        Ok(())
    }

    fn arrow_line(&mut self, toks: &[Token<'_>]) -> Result<(), Diagnostic> {
        match toks {
            [name, colon, src, arrow, dst] if colon.text == ":" && arrow.text == "->" => {
                check_name(*name)?;
                if name.text.starts_with("id[") {
                    return Err(diag(
                        name.pos,
                        DiagnosticKind::Syntax,
                        "names of the form `id[..]` are reserved for identities",
                    ));
                }
                if self.arrows.contains_key(name.text) {
                    return Err(diag(name.pos, DiagnosticKind::Duplicate, format!("arrow `{}` declared twice", name.text)));
                }
                let (s, t) = (self.object(*src)?, self.object(*dst)?);
                let f = self.cat.arrow(name.text, s, t);
                self.arrows.insert(name.text.to_string(), f);
                self.arrow_pos.insert(f, name.pos);
                Ok(())
            }
            [kw, g, f, eq, h] if kw.text == "compose" && eq.text == "=" => {
                let (gi, fi, hi) = (self.arrow(*g)?, self.arrow(*f)?, self.arrow(*h)?);
                let (gs, gt) = self.cat.arrow_endpoints(gi);
                let (fs, ft) = self.cat.arrow_endpoints(fi);
                let (hs, ht) = self.cat.arrow_endpoints(hi);
                if gs != ft {
                    return Err(diag(
                        g.pos,
                        DiagnosticKind::LawViolation,
                        format!("`{}` and `{}` are not composable", g.text, f.text),
                    ));
                }
                if (hs, ht) != (fs, gt) {
                    return Err(diag(
                        h.pos,
                        DiagnosticKind::LawViolation,
                        format!("`{}` does not have the endpoints of `{} ∘ {}`", h.text, g.text, f.text),
                    ));
                }
                if let Some((prev, _)) = self.compose.get(&(gi, fi)) {
                    if *prev != hi {
                        return Err(diag(
                            kw.pos,
                            DiagnosticKind::LawViolation,
                            format!("conflicting composites for `{} ∘ {}`", g.text, f.text),
                        ));
                    }
                }
                self.compose.insert((gi, fi), (hi, kw.pos));
                Ok(())
            }
            _ => {
                let shape: &[Option<&str>] = match toks[0].text {
                    "compose" => &[Some("compose"), None, None, Some("="), None],
                    _ => DECL,
                };
                Err(diag(
                    mismatch(toks, shape),
                    DiagnosticKind::Syntax,
                    "expected `name : src -> dst` or `compose g f = h`",
                ))
            }
        }
    }

    fn module_line(&mut self, toks: &[Token<'_>]) -> Result<(), Diagnostic> {
        match toks {
            [name, colon, src, arrow, dst] if colon.text == ":" && arrow.text == "->" => {
                check_name(*name)?;
                if self.elements.contains_key(name.text) {
                    return Err(diag(
                        name.pos,
                        DiagnosticKind::Duplicate,
                        format!("element `{}` declared twice", name.text),
                    ));
                }
                let (s, t) = (self.object(*src)?, self.object(*dst)?);
                let m = self.module.element(name.text, s, t);
                self.elements.insert(name.text.to_string(), m);
                self.element_ends.push((s, t));
                self.element_pos.push(name.pos);
                Ok(())
            }
            [kw, f, m, eq, m2] if kw.text == "lact" && eq.text == "=" => {
                let (fi, mi, m2i) = (self.arrow(*f)?, self.element(*m)?, self.element(*m2)?);
                let (fs, ft) = self.cat.arrow_endpoints(fi);
                let (ms, mt) = self.element_ends[mi.0];
                if fs != mt {
                    return Err(diag(
                        f.pos,
                        DiagnosticKind::LawViolation,
                        format!("`{}` cannot act on the left of `{}`", f.text, m.text),
                    ));
                }
                if self.element_ends[m2i.0] != (ms, ft) {
                    return Err(diag(
                        m2.pos,
                        DiagnosticKind::LawViolation,
                        format!("`{}` does not have the endpoints of `{} · {}`", m2.text, f.text, m.text),
                    ));
                }
                if matches!(self.lact.get(&(fi, mi)), Some((prev, _)) if *prev != m2i) {
                    return Err(diag(
                        kw.pos,
                        DiagnosticKind::LawViolation,
                        format!("conflicting values for `{} · {}`", f.text, m.text),
                    ));
                }
                self.lact.insert((fi, mi), (m2i, kw.pos));
                Ok(())
            }
            [kw, m, g, eq, m2] if kw.text == "ract" && eq.text == "=" => {
                let (mi, gi, m2i) = (self.element(*m)?, self.arrow(*g)?, self.element(*m2)?);
                let (gs, gt) = self.cat.arrow_endpoints(gi);
                let (ms, mt) = self.element_ends[mi.0];
                if gt != ms {
                    return Err(diag(
                        g.pos,
                        DiagnosticKind::LawViolation,
                        format!("`{}` cannot act on the right of `{}`", g.text, m.text),
                    ));
                }
                if self.element_ends[m2i.0] != (gs, mt) {
                    return Err(diag(
                        m2.pos,
                        DiagnosticKind::LawViolation,
                        format!("`{}` does not have the endpoints of `{} · {}`", m2.text, m.text, g.text),
                    ));
                }
                if matches!(self.ract.get(&(mi, gi)), Some((prev, _)) if *prev != m2i) {
                    return Err(diag(
                        kw.pos,
                        DiagnosticKind::LawViolation,
                        format!("conflicting values for `{} · {}`", m.text, g.text),
                    ));
                }
                self.ract.insert((mi, gi), (m2i, kw.pos));
                Ok(())
            }
            _ => {
                let shape: &[Option<&str>] = match toks[0].text {
                    "lact" => &[Some("lact"), None, None, Some("="), None],
                    "ract" => &[Some("ract"), None, None, Some("="), None],
                    _ => DECL,
                };
                Err(diag(
                    mismatch(toks, shape),
                    DiagnosticKind::Syntax,
                    "expected `name : src -> dst`, `lact f m = m'` or `ract m g = m'`",
                ))
            }
        }
    }

    fn metric_line(&mut self, toks: &[Token<'_>]) -> Result<(), Diagnostic> {
        let value = |tok: Token<'_>| -> Result<Rational, Diagnostic> {
            let q = parse_rational(tok.text).map_err(|e| diag(tok.pos, DiagnosticKind::Syntax, e.to_string()))?;
            if q < Rational::from_integer(0.into()) {
                return Err(diag(tok.pos, DiagnosticKind::Metric, "bounds must be non-negative"));
            }
            Ok(q)
        };
        match toks {
            [kw, a, q] if kw.text == "diam" => {
                let a = self.object(*a)?;
                let q = value(*q)?;
                self.metric.get_or_insert_with(MetricDraft::default).diam.insert(a, q);
                Ok(())
            }
            [kw, m, q] if kw.text == "lip" => {
                let m = self.element(*m)?;
                let q = value(*q)?;
                self.metric.get_or_insert_with(MetricDraft::default).lip.insert(m, q);
                Ok(())
            }
            [kw, a] if kw.text == "empty" => {
                let a = self.object(*a)?;
                self.metric.get_or_insert_with(MetricDraft::default).empty.insert(a, kw.pos);
                Ok(())
            }
            _ => {
                let pos = match toks[0].text {
                    "diam" | "lip" => mismatch(toks, &[None, None, None]),
                    "empty" => mismatch(toks, &[None, None]),
                    _ => toks[0].pos,
                };
                Err(diag(pos, DiagnosticKind::Syntax, "expected `diam object q`, `lip element q` or `empty object`"))
            }
        }
    }

    fn feed(&mut self, text: &str) -> Result<(), Diagnostic> {
        let mut section = None;
        for (i, line) in text.lines().enumerate() {
            let toks = tokenize(i + 1, line);
            let Some(first) = toks.first().copied() else {
                continue;
            };
            if let (Some(s), 1) = (section_of(first.text), toks.len()) {
                if self.fixed && s != Section::Metric {
                    return Err(diag(first.pos, DiagnosticKind::Syntax, "only a `metric` section is allowed here"));
                }
                if s == Section::Metric {
                    self.metric.get_or_insert_with(MetricDraft::default).header = first.pos;
                }
                self.headers.entry(s).or_insert(first.pos);
                section = Some(s);
                continue;
            }
            match section {
                None if self.fixed => {
                    section = Some(Section::Metric);
                    self.metric.get_or_insert_with(|| MetricDraft {
                        header: first.pos,
                        ..MetricDraft::default()
                    });
                    self.metric_line(&toks)?;
                }
                None => {
                    return Err(diag(
                        first.pos,
                        DiagnosticKind::Syntax,
                        "expected a section header (`objects`, `arrows`, `module` or `metric`)",
                    ))
                }
                Some(Section::Objects) => {
                    for t in toks {
                        self.declare_object(t)?;
                    }
                }
                Some(Section::Arrows) => self.arrow_line(&toks)?,
                Some(Section::Module) => self.module_line(&toks)?,
                Some(Section::Metric) => self.metric_line(&toks)?,
            }
        }
        Ok(())
    }

    fn header(&self, s: Section) -> Pos {
        self.headers.get(&s).copied().unwrap_or(Pos { line: 1, column: 1 })
    }

    fn finish_category(&mut self) -> Result<FiniteCategory, Diagnostic> {
        let mut cb = std::mem::take(&mut self.cat);
        let non_id: Vec<(ArrowId, Pos)> = self.arrow_pos.iter().map(|(&f, &p)| (f, p)).collect();
        for &(g, gp) in &non_id {
            for &(f, fp) in &non_id {
                if cb.arrow_endpoints(g).0 == cb.arrow_endpoints(f).1 && !self.compose.contains_key(&(g, f)) {
                    let pos = if gp.line >= fp.line { gp } else { fp };
                    let name = |a: ArrowId| self.arrows.iter().find(|(_, &v)| v == a).map(|(k, _)| k.clone());
                    return Err(diag(
                        pos,
                        DiagnosticKind::CompositionGap,
                        format!(
                            "composition table gap: `compose {} {} = ?` is missing",
                            name(g).unwrap_or_default(),
                            name(f).unwrap_or_default()
                        ),
                    ));
                }
            }
        }
        for (&(g, f), &(h, _)) in &self.compose {
            cb.compose(g, f, h);
        }
        let cat = cb.build_unchecked();
        if let CategoryReport::Violation(v) = cat.validate() {
            return Err(diag(self.header(Section::Arrows), DiagnosticKind::LawViolation, v.describe(&cat)));
        }
        Ok(cat)
    }

    fn finish_module(&mut self, cat: &FiniteCategory) -> Result<Module, Diagnostic> {
        let mut mb = std::mem::take(&mut self.module);
        for (i, &(s, t)) in self.element_ends.iter().enumerate() {
            let m = ElemId(i);
            let pos = self.element_pos[i];
            let name = self.elements.iter().find(|(_, &v)| v == m).map(|(k, _)| k.as_str()).unwrap_or("?");
            for &f in cat.arrows_out_of(t) {
                if !cat.is_identity(f) && !self.lact.contains_key(&(f, m)) {
                    return Err(diag(
                        pos,
                        DiagnosticKind::ActionGap,
                        format!("action gap: `lact {} {} = ?` is missing", cat.arrow(f).name, name),
                    ));
                }
            }
            for &g in cat.arrows_into(s) {
                if !cat.is_identity(g) && !self.ract.contains_key(&(m, g)) {
                    return Err(diag(
                        pos,
                        DiagnosticKind::ActionGap,
                        format!("action gap: `ract {} {} = ?` is missing", name, cat.arrow(g).name),
                    ));
                }
            }
        }
        for (&(f, m), &(m2, _)) in &self.lact {
            mb.lact(f, m, m2);
        }
        for (&(m, g), &(m2, _)) in &self.ract {
            mb.ract(m, g, m2);
        }
        let module = mb.build_unchecked(cat);
        if let Some(v) = module.validate(cat) {
            return Err(diag(self.header(Section::Module), DiagnosticKind::LawViolation, v.describe(cat, &module)));
        }
        Ok(module)
    }

    fn finish_metric(&mut self, sys: &SystemDef) -> Result<Option<MetricSpec>, Diagnostic> {
        let Some(draft) = self.metric.take() else {
            return Ok(None);
        };
        let cat = sys.category();
        let module = sys.module();
        let mut ann = MetricAnnotation::unset(sys);
        for a in cat.objects() {
            let d = draft.diam.get(&a).cloned().ok_or_else(|| {
                diag(
                    draft.header,
                    DiagnosticKind::Metric,
                    format!("no diameter bound for object `{}`", cat.object_name(a)),
                )
            })?;
            ann.set_diam(a, d);
        }
        for m in module.ids() {
            let l = draft.lip.get(&m).cloned().ok_or_else(|| {
                diag(
                    draft.header,
                    DiagnosticKind::Metric,
                    format!("no Lipschitz bound for element `{}`", module.name(m)),
                )
            })?;
            ann.set_lip(m, l);
        }
        ann.validate(sys)
            .map_err(|e| diag(draft.header, DiagnosticKind::Metric, e.to_string()))?;
        let mut empty = vec![false; sys.object_count()];
        for a in draft.empty.keys() {
            empty[a.0] = true;
        }
        Ok(Some(MetricSpec { annotation: ann, empty }))
    }
}

/// Parses and validates an `.ssd` file, with an optional `metric` section.
pub fn parse_sysdef(text: &str) -> Result<Parsed, Diagnostic> {
    let mut b = Builder::default();
    b.feed(text)?;
    let cat = b.finish_category()?;
    let module = b.finish_module(&cat)?;
    let system = SystemDef::new(cat, module).map_err(|e| diag(Pos { line: 1, column: 1 }, DiagnosticKind::LawViolation, e.to_string()))?;
    let metric = b.finish_metric(&system)?;
    Ok(Parsed { system, metric })
}

/// Parses a `.met` file against `sys`. The `metric` header is optional.
pub fn parse_metric(text: &str, sys: &SystemDef) -> Result<MetricSpec, Diagnostic> {
    let mut b = Builder::from_system(sys);
    b.feed(text)?;
    b.finish_metric(sys)?
        .ok_or_else(|| diag(Pos { line: 1, column: 1 }, DiagnosticKind::Metric, "no metric annotations found"))
}

fn wrap_names<'a>(out: &mut String, names: impl Iterator<Item = &'a str>) {
    let mut line = String::new();
    for n in names {
        if !line.is_empty() && line.len() + 1 + n.len() > 76 {
            out.push_str("  ");
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        if !line.is_empty() {
            line.push(' ');
        }
        line.push_str(n);
    }
    if !line.is_empty() {
        out.push_str("  ");
        out.push_str(&line);
        out.push('\n');
    }
}

/// Normal form of a system: declarations in id order, then every fact not
/// implied by the identity laws.
pub fn print_sysdef(sys: &SystemDef) -> String {
    let cat = sys.category();
    let module = sys.module();
    let an = |f: ArrowId| cat.arrow(f).name.as_str();
    let on = |a: ObjId| cat.object_name(a);
    let mut out = String::from("objects\n");
    wrap_names(&mut out, cat.object_names().iter().map(String::as_str));

    let arrows: Vec<ArrowId> = cat.arrow_ids().filter(|&f| !cat.is_identity(f)).collect();
    if !arrows.is_empty() {
        out.push_str("\narrows\n");
        for &f in &arrows {
            out.push_str(&format!("  {} : {} -> {}\n", an(f), on(cat.src(f)), on(cat.dst(f))));
        }
        for (&(g, f), &h) in cat.composition_table() {
            if !cat.is_identity(g) && !cat.is_identity(f) {
                out.push_str(&format!("  compose {} {} = {}\n", an(g), an(f), an(h)));
            }
        }
    }

    if !module.is_empty() {
        out.push_str("\nmodule\n");
        for m in module.ids() {
            out.push_str(&format!("  {} : {} -> {}\n", module.name(m), on(module.src(m)), on(module.dst(m))));
        }
        for (&(f, m), &m2) in module.left_table() {
            if !cat.is_identity(f) {
                out.push_str(&format!("  lact {} {} = {}\n", an(f), module.name(m), module.name(m2)));
            }
        }
        for (&(m, g), &m2) in module.right_table() {
            if !cat.is_identity(g) {
                out.push_str(&format!("  ract {} {} = {}\n", module.name(m), an(g), module.name(m2)));
            }
        }
    }
    out
}

pub fn print_metric(sys: &SystemDef, spec: &MetricSpec) -> String {
    let cat = sys.category();
    let module = sys.module();
    let mut out = String::from("metric\n");
    for a in cat.objects() {
        out.push_str(&format!("  diam {} {}\n", cat.object_name(a), format_rational(spec.annotation.d(a))));
    }
    for m in module.ids() {
        out.push_str(&format!("  lip {} {}\n", module.name(m), format_rational(spec.annotation.l(m))));
    }
    for a in cat.objects().filter(|a| spec.empty[a.0]) {
        out.push_str(&format!("  empty {}\n", cat.object_name(a)));
    }
    out
}

/// A system and its annotations in one file.
pub fn print_with_metric(sys: &SystemDef, spec: &MetricSpec) -> String {
    format!("{}\n{}", print_sysdef(sys), print_metric(sys, spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_carry_columns() {
        let t = tokenize(3, "  sigma : 0 -> 1  # c");
        let cols: Vec<_> = t.iter().map(|t| (t.text, t.pos.column)).collect();
        assert_eq!(cols, [("sigma", 3), (":", 9), ("0", 11), ("->", 13), ("1", 16)]);
    }

    #[test]
    fn identities_are_addressable() {
        let p = parse_sysdef("objects\n A\nmodule\n m : A -> A\n lact id[A] m = m\n").unwrap();
        assert_eq!(p.system.module().len(), 1);
    }
}
