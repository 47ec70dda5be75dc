//! Benchmark programs shipped with the crate.

pub const QUEENS: &str = include_str!("../corpus/queens.pl");
pub const ZEBRA: &str = include_str!("../corpus/zebra.pl");
pub const MERGESORT: &str = include_str!("../corpus/mergesort.pl");
pub const NREV: &str = include_str!("../corpus/nrev.pl");
pub const PEANO: &str = include_str!("../corpus/peano.pl");
pub const INORDER: &str = include_str!("../corpus/inorder.pl");
pub const POWERSET: &str = include_str!("../corpus/powerset.pl");

/// `(name, source)` for every program.
pub const ALL: [(&str, &str); 7] = [
    ("queens", QUEENS),
    ("zebra", ZEBRA),
    ("mergesort", MERGESORT),
    ("nrev", NREV),
    ("peano", PEANO),
    ("inorder", INORDER),
    ("powerset", POWERSET),
];
