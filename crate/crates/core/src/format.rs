//! The `POSET v1` text format.
//!
//! ```text
//! # comment
//! elem a
//! elem b
//! a < b
//! ```
//!
//! `elem` lines declare elements in order; relation lines `x < y` are
//! generators of the order and declare any unseen element on first use.
//! The order is the reflexive-transitive closure of all generators.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::poset::{valid_name, Poset};
use crate::set::{ElemSet, MAX_ELEMENTS};

pub const HEADER: &str = "# POSET v1";

pub fn parse(text: &str) -> Result<Poset> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    // Running reflexive-transitive closure, so cycles are reported on the line that closes them.
    let mut up: Vec<ElemSet> = Vec::new();
    let mut pairs = Vec::new();

    let err = |line: usize, message: String| Error::Parse { line, message };

    let mut declare = |name: &str,
                       line: usize,
                       names: &mut Vec<String>,
                       up: &mut Vec<ElemSet>|
     -> Result<usize> {
        if let Some(&i) = index.get(name) {
            return Ok(i);
        }
        if !valid_name(name) {
            return Err(err(line, format!("invalid element name `{name}`")));
        }
        if names.len() == MAX_ELEMENTS {
            return Err(err(line, format!("more than {MAX_ELEMENTS} elements")));
        }
        let i = names.len();
        names.push(name.to_owned());
        up.push(ElemSet::singleton(i));
        index.insert(name.to_owned(), i);
        Ok(i)
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        // `<` separates tokens with or without surrounding whitespace.
        let spaced = content.replace('<', " < ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        match tokens.as_slice() {
            ["elem", name] => {
                if names.iter().any(|n| n == name) {
                    return Err(err(line, format!("element `{name}` declared twice")));
                }
                declare(name, line, &mut names, &mut up)?;
            }
            [x, "<", y] => {
                let xi = declare(x, line, &mut names, &mut up)?;
                let yi = declare(y, line, &mut names, &mut up)?;
                if up[yi].contains(xi) {
                    return Err(err(line, format!("`{x} < {y}` closes a cycle")));
                }
                let above = up[yi];
                for row in up.iter_mut() {
                    if row.contains(xi) {
                        *row |= above;
                    }
                }
                pairs.push((xi, yi));
            }
            _ => {
                return Err(err(
                    line,
                    format!("expected `elem NAME` or `NAME < NAME`, found `{content}`"),
                ))
            }
        }
    }
    if names.is_empty() {
        return Err(err(text.lines().count().max(1), "no elements".into()));
    }
    Poset::from_index_pairs(names, &pairs)
}

/// Writes every element as an `elem` line followed by the cover relations.
pub fn write(p: &Poset) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    for name in p.names() {
        writeln!(out, "elem {name}").unwrap();
    }
    for (x, y) in p.covers() {
        writeln!(out, "{} < {}", p.name(x), p.name(y)).unwrap();
    }
    out
}
