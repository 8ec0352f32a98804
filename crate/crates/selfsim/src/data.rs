//! Example files shipped with the crate.

pub const FREYD_SSD: &str = include_str!("../data/freyd.ssd");
pub const FREYD_MET: &str = include_str!("../data/freyd.met");
pub const CIRCLE_SSD: &str = include_str!("../data/circle.ssd");
pub const CIRCLE_MET: &str = include_str!("../data/circle.met");
pub const CANTOR2_SSD: &str = include_str!("../data/cantor2.ssd");
pub const CANTOR2_MET: &str = include_str!("../data/cantor2.met");
pub const CANTOR3_SSD: &str = include_str!("../data/cantor3.ssd");
pub const DISCRETE_AB_SSD: &str = include_str!("../data/discrete_ab.ssd");
pub const THREE_SUMMAND_SSD: &str = include_str!("../data/three_summand.ssd");
pub const IDENTITY_SSD: &str = include_str!("../data/identity.ssd");
pub const UNIT_LOOP_MET: &str = include_str!("../data/unit_loop.met");
pub const NULL_LOOP_MET: &str = include_str!("../data/null_loop.met");
pub const EMPTY_SSD: &str = include_str!("../data/empty.ssd");

pub const SIERPINSKI_JSON: &str = include_str!("../data/sierpinski.json");
pub const UNIT_SQUARE_JSON: &str = include_str!("../data/unit_square.json");
pub const INTERVAL_JSON: &str = include_str!("../data/interval.json");
pub const COVER8_JSON: &str = include_str!("../data/cover8.json");

/// Every bundled `.ssd` file by name.
pub const SYSTEMS: &[(&str, &str)] = &[
    ("freyd.ssd", FREYD_SSD),
    ("circle.ssd", CIRCLE_SSD),
    ("cantor2.ssd", CANTOR2_SSD),
    ("cantor3.ssd", CANTOR3_SSD),
    ("discrete_ab.ssd", DISCRETE_AB_SSD),
    ("three_summand.ssd", THREE_SUMMAND_SSD),
    ("identity.ssd", IDENTITY_SSD),
    ("empty.ssd", EMPTY_SSD),
];

/// Bundled annotation files with the system each one belongs to.
pub const METRICS: &[(&str, &str, &str)] = &[
    ("freyd.met", FREYD_SSD, FREYD_MET),
    ("circle.met", CIRCLE_SSD, CIRCLE_MET),
    ("cantor2.met", CANTOR2_SSD, CANTOR2_MET),
    ("unit_loop.met", IDENTITY_SSD, UNIT_LOOP_MET),
    ("null_loop.met", IDENTITY_SSD, NULL_LOOP_MET),
];
