//! Truncated shift-space arithmetic on `2^ℕ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::address::AddressChain;
use crate::category::ObjId;
use crate::module::{ElemId, SystemDef};
use crate::rational::Rational;
use crate::{Error, Result};

/// A finite bit sequence `b₀ b₁ … b_{d−1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitWord(pub Vec<u8>);

impl BitWord {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Input("bits must be 0 or 1".into()));
        }
        Ok(BitWord(bits))
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn truncate(&self, d: usize) -> BitWord {
        BitWord(self.0[..d.min(self.0.len())].to_vec())
    }

    /// All words of depth `d` in lexicographic order.
    pub fn all(d: usize) -> Vec<BitWord> {
        (0..1u64 << d)
            .map(|v| BitWord((0..d).map(|i| ((v >> (d - 1 - i)) & 1) as u8).collect()))
            .collect()
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// An eventually periodic stream `prefix (cycle)^ω`; `cycle` is nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stream {
    pub prefix: Vec<u8>,
    pub cycle: Vec<u8>,
}

impl Stream {
    pub fn bit(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn truncate(&self, d: usize) -> BitWord {
        BitWord((0..d).map(|i| self.bit(i)).collect())
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.prefix {
            write!(f, "{b}")?;
        }
        f.write_str("(")?;
        for b in &self.cycle {
            write!(f, "{b}")?;
        }
        f.write_str(")^ω")
    }
}

/// A word as written on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Finite(BitWord),
    Periodic(Stream),
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Input(format!("unexpected `{c}` in a bit word"))),
        })
        .collect()
}

/// Parses `0110`, or `0110(01)^ω` (also `^w` or `^omega`) for eventually
/// periodic streams.
pub fn parse_word(text: &str) -> Result<Word> {
    let s = text.trim();
    if let Some(open) = s.find('(') {
        let close = s
            .rfind(')')
            .ok_or_else(|| Error::Input(format!("unbalanced parenthesis in `{text}`")))?;
        let tail = s[close + 1..].trim();
        if !matches!(tail, "^ω" | "^w" | "^omega") {
            return Err(Error::Input(format!("expected `^ω` after the period in `{text}`")));
        }
        let prefix = parse_bits(&s[..open])?;
        let cycle = parse_bits(&s[open + 1..close])?;
        if cycle.is_empty() {
            return Err(Error::Input("empty period".into()));
        }
        return Ok(Word::Periodic(Stream { prefix, cycle }));
    }
    Ok(Word::Finite(BitWord(parse_bits(s)?)))
}

/// Bits prepended by `ψ^{(k)}_i`: `p(1, 0)` is empty, `p(k+1, k) = 1` and
/// `p(k+1, i) = 0·p(k, i)` for `i < k`.
pub fn psi_prefix(k: usize, i: usize) -> Result<Vec<u8>> {
    if k == 0 || i >= k {
        return Err(Error::IndexOutOfRange { index: i, bound: k });
    }
    let mut p = Vec::new();
    let mut kk = k;
    while kk > 1 {
        if i == kk - 1 {
            p.push(1);
            return Ok(p);
        }
        p.push(0);
        kk -= 1;
    }
    Ok(p)
}

/// `ψ^{(k)}_i(w)`.
pub fn psi_k(k: usize, i: usize, w: &BitWord) -> Result<BitWord> {
    let mut v = psi_prefix(k, i)?;
    v.extend_from_slice(&w.0);
    Ok(BitWord(v))
}

/// Per-object choice `s_a: Σ_b M(b, a) → 2` with a section `r_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitChoice {
    pub s: BTreeMap<ElemId, u8>,
    pub r: Vec<[ElemId; 2]>,
}

fn summands_ok(sys: &SystemDef) -> Result<()> {
    if !sys.is_discrete() {
        return Err(Error::Unsupported("the codec needs a discrete system".into()));
    }
    for a in sys.category().objects() {
        let n = sys.module().elements_into(a).len();
        if !(1..=2).contains(&n) {
            return Err(Error::Unsupported(format!(
                "object `{}` has {n} summands; binarize and prune first",
                sys.category().object_name(a)
            )));
        }
    }
    Ok(())
}

impl SplitChoice {
    /// Declaration order: first summand ↦ 0, second ↦ 1; `r_a(1)` is the
    /// second summand if there is one.
    pub fn default_for(sys: &SystemDef) -> Result<Self> {
        summands_ok(sys)?;
        let mut s = BTreeMap::new();
        let mut r = Vec::new();
        for a in sys.category().objects() {
            let into = sys.module().elements_into(a);
            s.insert(into[0], 0);
            if let Some(&second) = into.get(1) {
                s.insert(second, 1);
                r.push([into[0], second]);
            } else {
                r.push([into[0], into[0]]);
            }
        }
        Ok(SplitChoice { s, r })
    }

    /// A custom choice, checked for `r_a ∘ s_a = id`.
    pub fn new(sys: &SystemDef, s: BTreeMap<ElemId, u8>, r: Vec<[ElemId; 2]>) -> Result<Self> {
        summands_ok(sys)?;
        let module = sys.module();
        if r.len() != sys.object_count() {
            return Err(Error::Input("one section per object is required".into()));
        }
        for a in sys.category().objects() {
            for &m in module.elements_into(a) {
                let bit = *s
                    .get(&m)
                    .ok_or_else(|| Error::Input(format!("no bit chosen for `{}`", module.name(m))))?;
                if bit > 1 || r[a.0][bit as usize] != m {
                    return Err(Error::Input(format!("r ∘ s is not the identity at `{}`", module.name(m))));
                }
            }
            if r[a.0].iter().any(|&m| m.0 >= module.len() || module.dst(m) != a) {
                return Err(Error::Input("section lands outside the summands".into()));
            }
        }
        Ok(SplitChoice { s, r })
    }
}

/// `σ`: the i-th bit is `s_{a_{i−1}}(mᵢ)`.
pub fn sigma(sys: &SystemDef, choice: &SplitChoice, chain: &AddressChain) -> Result<BitWord> {
    summands_ok(sys)?;
    if !chain.is_valid(sys) {
        return Err(Error::Input("not a chain of this system".into()));
    }
    Ok(BitWord(chain.elements.iter().map(|m| choice.s[m]).collect()))
}

/// `ρ`: reads one summand per bit starting at `a`.
pub fn rho(sys: &SystemDef, choice: &SplitChoice, a: ObjId, w: &BitWord) -> Result<AddressChain> {
    summands_ok(sys)?;
    let mut chain = AddressChain::empty(a);
    let mut cur = a;
    for &b in &w.0 {
        let m = choice.r[cur.0][b as usize];
        chain.push(m);
        cur = sys.module().src(m);
    }
    Ok(chain)
}

/// An infinite chain `prefix (cycle)^ω`; the cycle returns to its start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoChain {
    pub base: ObjId,
    pub prefix: Vec<ElemId>,
    pub cycle: Vec<ElemId>,
}

impl LassoChain {
    pub fn truncate(&self, d: usize) -> AddressChain {
        let mut c = AddressChain::empty(self.base);
        for i in 0..d {
            let m = if i < self.prefix.len() {
                self.prefix[i]
            } else {
                self.cycle[(i - self.prefix.len()) % self.cycle.len()]
            };
            c.push(m);
        }
        c
    }

    pub fn is_valid(&self, sys: &SystemDef) -> bool {
        if self.cycle.is_empty() {
            return false;
        }
        let p = AddressChain {
            base: self.base,
            elements: self.prefix.clone(),
        };
        if !p.is_valid(sys) {
            return false;
        }
        let start = p.tip(sys);
        let c = AddressChain {
            base: start,
            elements: self.cycle.clone(),
        };
        c.is_valid(sys) && c.tip(sys) == start
    }
}

pub fn sigma_stream(sys: &SystemDef, choice: &SplitChoice, chain: &LassoChain) -> Result<Stream> {
    summands_ok(sys)?;
    if !chain.is_valid(sys) {
        return Err(Error::Input("not an infinite chain of this system".into()));
    }
    Ok(Stream {
        prefix: chain.prefix.iter().map(|m| choice.s[m]).collect(),
        cycle: chain.cycle.iter().map(|m| choice.s[m]).collect(),
    })
}

/// `ρ` on an eventually periodic stream; the result is again a lasso since
/// the pair (object, position in the period) eventually repeats.
pub fn rho_stream(sys: &SystemDef, choice: &SplitChoice, a: ObjId, w: &Stream) -> Result<LassoChain> {
    summands_ok(sys)?;
    let module = sys.module();
    let mut cur = a;
    let mut elems = Vec::new();
    for &b in &w.prefix {
        let m = choice.r[cur.0][b as usize];
        elems.push(m);
        cur = module.src(m);
    }
    let p = w.prefix.len();
    let mut seen: BTreeMap<(ObjId, usize), usize> = BTreeMap::new();
    let mut i = 0usize;
    loop {
        let phase = i % w.cycle.len();
        if let Some(&start) = seen.get(&(cur, phase)) {
            let cycle = elems[p + start..].to_vec();
            elems.truncate(p + start);
            return Ok(LassoChain {
                base: a,
                prefix: elems,
                cycle,
            });
        }
        seen.insert((cur, phase), i);
        let m = choice.r[cur.0][w.cycle[phase] as usize];
        elems.push(m);
        cur = module.src(m);
        i += 1;
    }
}

/// `Σ_{n<d} 2 bₙ 3^{−(n+1)}`.
pub fn ternary_embed(w: &BitWord) -> Rational {
    let mut num = BigInt::zero();
    for &b in &w.0 {
        num = num * 3 + BigInt::from(2 * b);
    }
    Rational::new(num, num_traits::pow(BigInt::from(3), w.depth()))
}

/// `[v, v + 3^{−d}]`: the closed interval holding the image of the
/// cylinder of `w`.
pub fn cylinder_interval(w: &BitWord) -> (Rational, Rational) {
    let lo = ternary_embed(w);
    let width = Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(3), w.depth()));
    let hi = &lo + width;
    (lo, hi)
}

/// Eventually periodic address of a stream under the ternary embedding.
pub fn ternary_embed_stream(w: &Stream) -> Rational {
    // value = prefix part + 3^{-p} · periodic part, periodic part =
    // v_c / (1 − 3^{−c}) where v_c is the embedding of one period
    let pre = ternary_embed(&BitWord(w.prefix.clone()));
    let vc = ternary_embed(&BitWord(w.cycle.clone()));
    let three_c = Rational::from_integer(num_traits::pow(BigInt::from(3), w.cycle.len()));
    let periodic = vc * &three_c / (three_c - Rational::from_integer(BigInt::from(1)));
    let scale = Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(3), w.prefix.len()));
    pre + periodic * scale
}

pub fn describe_chain(sys: &SystemDef, chain: &AddressChain) -> String {
    chain.display(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FiniteCategory;
    use crate::module::ModuleBuilder;
    use crate::rational::rat;

    #[test]
    fn prefix_table() {
        assert!(psi_prefix(1, 0).unwrap().is_empty());
        assert_eq!(psi_prefix(2, 0).unwrap(), [0]);
        assert_eq!(psi_prefix(2, 1).unwrap(), [1]);
        assert_eq!(psi_prefix(3, 0).unwrap(), [0, 0]);
        assert_eq!(psi_prefix(3, 1).unwrap(), [0, 1]);
        assert_eq!(psi_prefix(3, 2).unwrap(), [1]);
        assert!(psi_prefix(3, 3).is_err());
    }

    #[test]
    fn embedding_values() {
        assert_eq!(ternary_embed(&BitWord(alloc::vec![1, 1])), rat(8, 9));
        assert_eq!(ternary_embed(&BitWord(alloc::vec![0, 0, 0])), rat(0, 1));
        let all_ones = Stream {
            prefix: Vec::new(),
            cycle: alloc::vec![1],
        };
        assert_eq!(ternary_embed_stream(&all_ones), rat(1, 1));
    }

    #[test]
    fn parses_periodic_words() {
        assert_eq!(
            parse_word("0110(01)^ω").unwrap(),
            Word::Periodic(Stream {
                prefix: alloc::vec![0, 1, 1, 0],
                cycle: alloc::vec![0, 1]
            })
        );
        assert_eq!(parse_word("101").unwrap(), Word::Finite(BitWord(alloc::vec![1, 0, 1])));
        assert!(parse_word("10(2)^w").is_err());
    }

    #[test]
    fn rho_of_an_alexandroff_stream_is_a_lasso() {
        // A = A, B = B + A with s_B(B -> B) = 0, s_B(A -> B) = 1
        let cat = FiniteCategory::discrete(["A", "B"]);
        let mut m = ModuleBuilder::new();
        let aa = m.element("aa", ObjId(0), ObjId(0));
        let bb = m.element("bb", ObjId(1), ObjId(1));
        let ab = m.element("ab", ObjId(0), ObjId(1));
        let sys = SystemDef::new(cat.clone(), m.build(&cat).unwrap()).unwrap();
        let choice = SplitChoice::default_for(&sys).unwrap();
        assert_eq!(choice.s[&bb], 0);
        assert_eq!(choice.s[&ab], 1);
        let w = Stream {
            prefix: alloc::vec![0, 1],
            cycle: alloc::vec![0],
        };
        let lasso = rho_stream(&sys, &choice, ObjId(1), &w).unwrap();
        assert_eq!(lasso.prefix, alloc::vec![bb, ab]);
        assert_eq!(lasso.cycle, alloc::vec![aa]);
        assert_eq!(sigma_stream(&sys, &choice, &lasso).unwrap(), w);
    }
}
