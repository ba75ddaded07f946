//! Small named posets used throughout the tests and documentation.

use crate::poset::Poset;

fn build(names: &[&str], pairs: &[(&str, &str)]) -> Poset {
    Poset::from_edges(names, pairs).expect("fixture is a valid poset")
}

/// `{s}`
pub fn sing() -> Poset {
    build(&["s"], &[])
}

/// Chain `x < y < z`.
pub fn ch3() -> Poset {
    build(&["x", "y", "z"], &[("x", "y"), ("y", "z")])
}

/// Fence `z0 < z1 > z2 < z3`.
pub fn f3() -> Poset {
    build(
        &["z0", "z1", "z2", "z3"],
        &[("z0", "z1"), ("z2", "z1"), ("z2", "z3")],
    )
}

/// 4-crown `a < b > c < d > a`.
pub fn c4() -> Poset {
    build(
        &["a", "b", "c", "d"],
        &[("a", "b"), ("c", "b"), ("c", "d"), ("a", "d")],
    )
}

/// 6-crown `c0 < c1 > c2 < c3 > c4 < c5 > c0`.
pub fn c6() -> Poset {
    build(
        &["c0", "c1", "c2", "c3", "c4", "c5"],
        &[
            ("c0", "c1"),
            ("c2", "c1"),
            ("c2", "c3"),
            ("c4", "c3"),
            ("c4", "c5"),
            ("c0", "c5"),
        ],
    )
}

/// The 4-crown with one middle point `x` in the inner: `a, c < x < b, d`.
pub fn hourglass() -> Poset {
    build(
        &["a", "b", "c", "d", "x"],
        &[
            ("a", "b"),
            ("c", "b"),
            ("c", "d"),
            ("a", "d"),
            ("a", "x"),
            ("c", "x"),
            ("x", "b"),
            ("x", "d"),
        ],
    )
}

/// The 4-crown with two incomparable inner points `x`, `y`.
pub fn imp2() -> Poset {
    build(
        &["a", "b", "c", "d", "x", "y"],
        &[
            ("a", "b"),
            ("c", "b"),
            ("c", "d"),
            ("a", "d"),
            ("a", "x"),
            ("c", "x"),
            ("x", "b"),
            ("x", "d"),
            ("a", "y"),
            ("c", "y"),
            ("y", "b"),
            ("y", "d"),
        ],
    )
}

/// A poset with a single minmax cover `(a, b)` whose removal leaves it connected.
pub fn loopy() -> Poset {
    build(
        &["a", "b", "m", "u", "n", "l"],
        &[
            ("a", "b"),
            ("a", "m"),
            ("m", "u"),
            ("l", "n"),
            ("n", "u"),
            ("n", "b"),
        ],
    )
}

/// Every fixture, in a fixed order, with its name.
pub fn named() -> Vec<(&'static str, Poset)> {
    vec![
        ("SING", sing()),
        ("CH3", ch3()),
        ("F3", f3()),
        ("C4", c4()),
        ("C6", c6()),
        ("HG", hourglass()),
        ("IMP2", imp2()),
        ("LOOPY", loopy()),
    ]
}

pub fn all() -> Vec<Poset> {
    named().into_iter().map(|(_, p)| p).collect()
}
