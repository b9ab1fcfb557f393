//! Alloy compositions on the group-III and group-V sublattices.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Sublattice fractions must sum to 1 within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cation {
    Al,
    Ga,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Anion {
    P,
    As,
    Sb,
}

impl Cation {
    pub const ALL: [Cation; 3] = [Cation::Al, Cation::Ga, Cation::In];

    pub fn symbol(self) -> &'static str {
        match self {
            Cation::Al => "Al",
            Cation::Ga => "Ga",
            Cation::In => "In",
        }
    }
}

impl Anion {
    pub const ALL: [Anion; 3] = [Anion::P, Anion::As, Anion::Sb];

    pub fn symbol(self) -> &'static str {
        match self {
            Anion::P => "P",
            Anion::As => "As",
            Anion::Sb => "Sb",
        }
    }
}

/// Database name of the binary compound formed by a cation/anion pair.
pub fn binary_name(cation: Cation, anion: Anion) -> String {
    format!("{}{}", cation.symbol(), anion.symbol())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Element {
    Cation(Cation),
    Anion(Anion),
}

impl Element {
    fn from_symbol(s: &str) -> Option<Element> {
        Cation::ALL
            .into_iter()
            .find(|c| c.symbol() == s)
            .map(Element::Cation)
            .or_else(|| {
                Anion::ALL
                    .into_iter()
                    .find(|a| a.symbol() == s)
                    .map(Element::Anion)
            })
    }
}

/// Splits `Ga0.47In0.53As` into element symbols with optional fractions.
pub(crate) fn tokenize_formula(
    text: &str,
) -> std::result::Result<Vec<(Element, Option<f64>)>, String> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_uppercase() {
            return Err(format!("unexpected `{}` at position {i}", &text[i..i + 1]));
        }
        let start = i;
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_lowercase() {
            i += 1;
        }
        let symbol = &text[start..i];
        let element =
            Element::from_symbol(symbol).ok_or_else(|| format!("unknown element `{symbol}`"))?;
        let num_start = i;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        let fraction = if num_start == i {
            None
        } else {
            let raw = &text[num_start..i];
            Some(
                raw.parse::<f64>()
                    .map_err(|_| format!("bad fraction `{raw}` after {symbol}"))?,
            )
        };
        out.push((element, fraction));
    }
    if out.is_empty() {
        return Err("empty formula".into());
    }
    Ok(out)
}

/// Fractional occupation of both sublattices. Zero-fraction entries are
/// dropped, so a composition on an alloy edge endpoint is the binary itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    cations: BTreeMap<Cation, f64>,
    anions: BTreeMap<Anion, f64>,
}

impl Composition {
    pub fn new(
        cations: impl IntoIterator<Item = (Cation, f64)>,
        anions: impl IntoIterator<Item = (Anion, f64)>,
    ) -> Result<Self> {
        let cations = collect_sublattice(cations)?;
        let anions = collect_sublattice(anions)?;
        let comp = Composition { cations, anions };
        comp.check().map_err(|reason| Error::Composition {
            text: comp.to_string(),
            reason,
        })?;
        Ok(comp)
    }

    pub fn binary(cation: Cation, anion: Anion) -> Self {
        Composition {
            cations: BTreeMap::from([(cation, 1.0)]),
            anions: BTreeMap::from([(anion, 1.0)]),
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        check_sublattice("cation", self.cations.values().copied())?;
        check_sublattice("anion", self.anions.values().copied())?;
        Ok(())
    }

    pub fn cations(&self) -> impl Iterator<Item = (Cation, f64)> + '_ {
        self.cations.iter().map(|(&c, &f)| (c, f))
    }

    pub fn anions(&self) -> impl Iterator<Item = (Anion, f64)> + '_ {
        self.anions.iter().map(|(&a, &f)| (a, f))
    }

    pub fn cation_fraction(&self, c: Cation) -> f64 {
        self.cations.get(&c).copied().unwrap_or(0.0)
    }

    pub fn anion_fraction(&self, a: Anion) -> f64 {
        self.anions.get(&a).copied().unwrap_or(0.0)
    }

    /// Every (cation, anion, weight) corner binary, weight = product of fractions.
    pub fn binaries(&self) -> impl Iterator<Item = (Cation, Anion, f64)> + '_ {
        self.cations()
            .flat_map(move |(c, wc)| self.anions().map(move |(an, wa)| (c, an, wc * wa)))
    }

    pub fn is_binary(&self) -> bool {
        self.cations.len() == 1 && self.anions.len() == 1
    }
}

fn collect_sublattice<K: Ord + Copy>(
    items: impl IntoIterator<Item = (K, f64)>,
) -> Result<BTreeMap<K, f64>> {
    let mut map = BTreeMap::new();
    for (k, f) in items {
        if map.insert(k, f).is_some() {
            return Err(Error::InvalidArgument("element listed twice".into()));
        }
    }
    map.retain(|_, f| *f != 0.0);
    Ok(map)
}

fn check_sublattice(
    name: &str,
    fractions: impl Iterator<Item = f64>,
) -> std::result::Result<(), String> {
    let fractions: Vec<f64> = fractions.collect();
    if fractions.is_empty() {
        return Err(format!("no {name}"));
    }
    if fractions.len() > 2 {
        return Err(format!("more than two {name}s"));
    }
    if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(format!("{name} fraction {f} outside [0, 1]"));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(format!("{name} fractions sum to {sum}, not 1"));
    }
    Ok(())
}

/// Parses formulas such as `InP`, `Ga0.47In0.53As` or `In0.8Ga0.2As0.4P0.6`.
///
/// A fraction may be omitted only for the sole element of a sublattice.
pub fn parse_composition(text: &str) -> Result<Composition> {
    let err = |reason: String| Error::Composition {
        text: text.to_string(),
        reason,
    };
    let tokens = tokenize_formula(text.trim()).map_err(err)?;
    let mut cations = Vec::new();
    let mut anions = Vec::new();
    for (element, fraction) in tokens {
        match element {
            Element::Cation(c) => {
                if cations.iter().any(|(k, _)| *k == c) {
                    return Err(err(format!("{} listed twice", c.symbol())));
                }
                cations.push((c, fraction));
            }
            Element::Anion(a) => {
                if anions.iter().any(|(k, _)| *k == a) {
                    return Err(err(format!("{} listed twice", a.symbol())));
                }
                anions.push((a, fraction));
            }
        }
    }
    let cations = resolve_fractions("cation", cations).map_err(err)?;
    let anions = resolve_fractions("anion", anions).map_err(err)?;
    let comp = Composition {
        cations: cations.into_iter().filter(|(_, f)| *f != 0.0).collect(),
        anions: anions.into_iter().filter(|(_, f)| *f != 0.0).collect(),
    };
    comp.check().map_err(err)?;
    Ok(comp)
}

fn resolve_fractions<K>(
    name: &str,
    items: Vec<(K, Option<f64>)>,
) -> std::result::Result<Vec<(K, f64)>, String> {
    if items.len() > 2 {
        return Err(format!("more than two {name}s"));
    }
    let lone = items.len() == 1;
    items
        .into_iter()
        .map(|(k, f)| match f {
            Some(f) => Ok((k, f)),
            None if lone => Ok((k, 1.0)),
            None => Err(format!("missing fraction on a mixed {name} sublattice")),
        })
        .collect()
}

impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_composition(s)
    }
}

impl fmt::Display for Composition {
    /// Formula with shortest round-trip fractions; lone elements carry none.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lone_cation = self.cations.len() == 1;
        for (c, x) in &self.cations {
            f.write_str(c.symbol())?;
            if !(lone_cation && *x == 1.0) {
                write!(f, "{x}")?;
            }
        }
        let lone_anion = self.anions.len() == 1;
        for (a, y) in &self.anions {
            f.write_str(a.symbol())?;
            if !(lone_anion && *y == 1.0) {
                write!(f, "{y}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Composition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_binary() {
        let c = parse_composition("InP").unwrap();
        assert_eq!(c, Composition::binary(Cation::In, Anion::P));
        assert_eq!(c.to_string(), "InP");
    }

    #[test]
    fn gainas() {
        let c = parse_composition("Ga0.47In0.53As").unwrap();
        assert_eq!(c.cation_fraction(Cation::Ga), 0.47);
        assert_eq!(c.cation_fraction(Cation::In), 0.53);
        assert_eq!(c.anion_fraction(Anion::As), 1.0);
        assert_eq!(c.to_string(), "Ga0.47In0.53As");
    }

    #[test]
    fn quaternary() {
        let c = parse_composition("In0.8Ga0.2As0.4P0.6").unwrap();
        assert_eq!(c.binaries().count(), 4);
        let w: f64 = c.binaries().map(|(_, _, w)| w).sum();
        assert!((w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sum() {
        let e = parse_composition("Ga0.6In0.6As").unwrap_err();
        assert!(e.to_string().contains("1.2"), "{e}");
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "Xy",
            "InN",
            "GaInAs",
            "AlGaInAs",
            "InPP",
            "In2P",
            "inp",
            "In-0.1Ga1.1As",
            "InP0.5",
        ] {
            assert!(parse_composition(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn zero_fractions_drop_out() {
        let c = parse_composition("Ga0In1As").unwrap();
        assert!(c.is_binary());
        assert_eq!(c.to_string(), "InAs");
    }

    #[test]
    fn display_round_trips() {
        let c = Composition::new(
            [
                (Cation::In, 0.534_317_387_118_994_3),
                (Cation::Ga, 1.0 - 0.534_317_387_118_994_3),
            ],
            [(Anion::As, 0.3), (Anion::P, 0.7)],
        )
        .unwrap();
        assert_eq!(parse_composition(&c.to_string()).unwrap(), c);
    }
}
