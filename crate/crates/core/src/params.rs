//! Materials database: binary III-V compound records and ternary bowing
//! coefficients, loaded from a line-oriented parameter file.
//!
//! ```text
//! # comment
//! meta temperature="1.4-4.2 K"
//! compound InP a=5.86 eg_gamma=1.4236 eg_x=2.384 eg_l=2.014 delta_so=0.108 e_p=20.7 source="..."
//! bowing GaAs/InAs eg_gamma b=0.477 source="..."
//! ```
//!
//! Key/value pairs are whitespace separated and may appear in any order.
//! Quoted values accept `\"` and `\\` escapes.
//!
//! A [`MaterialsDatabase`] is only obtainable through validation, so every
//! record it serves satisfies the compound invariants. Unvalidated data lives
//! in a [`DatabaseDraft`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The parameter file shipped with the crate.
pub const DEFAULT_DATABASE_SOURCE: &str = include_str!("../data/iii_v_low_temperature.params");

/// File name of the shipped parameter file.
pub const DEFAULT_DATABASE_FILE: &str = "iii_v_low_temperature.params";

/// Loads the shipped low-temperature database.
pub fn default_database() -> MaterialsDatabase {
    load_database(DEFAULT_DATABASE_SOURCE).expect("shipped parameter file is valid")
}

/// A material parameter that can be interpolated across an alloy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    LatticeConstant,
    EgGamma,
    EgX,
    EgL,
    DeltaSo,
    Ep,
}

impl Param {
    pub const ALL: [Param; 6] = [
        Param::LatticeConstant,
        Param::EgGamma,
        Param::EgX,
        Param::EgL,
        Param::DeltaSo,
        Param::Ep,
    ];

    /// Energy parameters, the only ones allowed to bow.
    pub const ENERGIES: [Param; 5] = [
        Param::EgGamma,
        Param::EgX,
        Param::EgL,
        Param::DeltaSo,
        Param::Ep,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Param::LatticeConstant => "a",
            Param::EgGamma => "eg_gamma",
            Param::EgX => "eg_x",
            Param::EgL => "eg_l",
            Param::DeltaSo => "delta_so",
            Param::Ep => "e_p",
        }
    }

    /// Vegard's law: the lattice constant never bows.
    pub fn may_bow(self) -> bool {
        self != Param::LatticeConstant
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Param::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| format!("unknown parameter `{s}`"))
    }
}

/// Low-temperature parameter record for one binary compound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryCompound {
    pub name: String,
    /// Lattice constant, Å.
    pub a: f64,
    /// Direct gap at Γ, eV.
    pub eg_gamma: f64,
    /// X-valley gap, eV.
    pub eg_x: f64,
    /// L-valley gap, eV.
    pub eg_l: f64,
    /// Spin-orbit splitting Δ, eV.
    pub delta_so: f64,
    /// Kane energy E_p, eV.
    pub e_p: f64,
    pub source_note: String,
}

impl BinaryCompound {
    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::LatticeConstant => self.a,
            Param::EgGamma => self.eg_gamma,
            Param::EgX => self.eg_x,
            Param::EgL => self.eg_l,
            Param::DeltaSo => self.delta_so,
            Param::Ep => self.e_p,
        }
    }

    fn violations(&self, out: &mut Vec<Violation>) {
        for param in Param::ALL {
            let value = self.get(param);
            let rule = match param {
                Param::DeltaSo | Param::Ep if !(value >= 0.0 && value.is_finite()) => {
                    "must be finite and >= 0"
                }
                Param::LatticeConstant | Param::EgGamma | Param::EgX | Param::EgL
                    if !(value > 0.0 && value.is_finite()) =>
                {
                    "must be finite and > 0"
                }
                _ => continue,
            };
            out.push(Violation::new(
                &self.name,
                param.key(),
                format!("{rule}, got {value}"),
            ));
        }
        if self.source_note.trim().is_empty() {
            out.push(Violation::new(&self.name, "source", "must cite a source"));
        }
    }
}

/// Unordered pair of binaries sharing one sublattice, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TernaryId(String, String);

impl TernaryId {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Self {
        let (a, b) = (a.into(), b.into());
        if a <= b {
            TernaryId(a, b)
        } else {
            TernaryId(b, a)
        }
    }

    pub fn first(&self) -> &str {
        &self.0
    }

    pub fn second(&self) -> &str {
        &self.1
    }
}

impl fmt::Display for TernaryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowingEntry {
    pub ternary: TernaryId,
    pub param: Param,
    /// Bowing coefficient, eV.
    pub b: f64,
    pub source_note: String,
}

/// One broken invariant, naming the offending record, field and rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub record: String,
    pub field: String,
    pub rule: String,
}

impl Violation {
    fn new(record: &str, field: &str, rule: impl Into<String>) -> Self {
        Violation {
            record: record.to_string(),
            field: field.to_string(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {}", self.record, self.field, self.rule)
    }
}

/// Unvalidated database contents, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatabaseDraft {
    pub compounds: Vec<BinaryCompound>,
    pub bowings: Vec<BowingEntry>,
    pub temperature_note: String,
}

impl DatabaseDraft {
    /// Parses parameter-file text without checking value invariants.
    pub fn parse(source: &str) -> Result<Self> {
        let mut draft = DatabaseDraft::default();
        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens = tokenize(trimmed).map_err(|message| Error::Parse { line, message })?;
            let record = parse_record(&tokens).map_err(|message| Error::Parse { line, message })?;
            match record {
                Record::Meta(note) => draft.temperature_note = note,
                Record::Compound(c) => draft.compounds.push(c),
                Record::Bowing(b) => draft.bowings.push(b),
            }
        }
        Ok(draft)
    }

    /// Validates and freezes the draft.
    pub fn freeze(self) -> Result<MaterialsDatabase> {
        let violations = validate_database(&self);
        if !violations.is_empty() {
            return Err(Error::InvalidDatabase(violations));
        }
        let compounds = self
            .compounds
            .into_iter()
            .map(|c| (c.name.clone(), c))
            .collect();
        let bowings = self
            .bowings
            .into_iter()
            .map(|b| ((b.ternary.clone(), b.param), b))
            .collect();
        Ok(MaterialsDatabase {
            compounds,
            bowings,
            temperature_note: self.temperature_note,
        })
    }
}

/// Lists every broken invariant of a draft; empty iff the draft is valid.
pub fn validate_database(draft: &DatabaseDraft) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = BTreeMap::new();
    for c in &draft.compounds {
        if seen.insert(c.name.as_str(), ()).is_some() {
            out.push(Violation::new(&c.name, "name", "is duplicated"));
        }
        c.violations(&mut out);
    }
    let mut seen_bowing = BTreeMap::new();
    for b in &draft.bowings {
        let record = format!("bowing {}", b.ternary);
        for member in [b.ternary.first(), b.ternary.second()] {
            if !seen.contains_key(member) {
                out.push(Violation::new(
                    &record,
                    "ternary",
                    format!("references missing compound `{member}`"),
                ));
            }
        }
        if b.ternary.first() == b.ternary.second() {
            out.push(Violation::new(
                &record,
                "ternary",
                "needs two distinct compounds",
            ));
        }
        if !b.param.may_bow() {
            out.push(Violation::new(
                &record,
                b.param.key(),
                "never bows (Vegard's law)",
            ));
        }
        if !b.b.is_finite() {
            out.push(Violation::new(&record, "b", "must be finite"));
        }
        if seen_bowing.insert((&b.ternary, b.param), ()).is_some() {
            out.push(Violation::new(
                &record,
                b.param.key(),
                "has more than one entry",
            ));
        }
    }
    out
}

/// Validated, immutable parameter store.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialsDatabase {
    compounds: BTreeMap<String, BinaryCompound>,
    bowings: BTreeMap<(TernaryId, Param), BowingEntry>,
    temperature_note: String,
}

/// Parses and validates parameter-file text.
pub fn load_database(source: &str) -> Result<MaterialsDatabase> {
    DatabaseDraft::parse(source)?.freeze()
}

impl MaterialsDatabase {
    /// Returns a copy of the named record.
    pub fn get_binary(&self, name: &str) -> Result<BinaryCompound> {
        self.binary(name).cloned()
    }

    pub(crate) fn binary(&self, name: &str) -> Result<&BinaryCompound> {
        self.compounds
            .get(name)
            .ok_or_else(|| Error::UnknownCompound(name.to_string()))
    }

    /// Bowing coefficient for a ternary edge, 0 when none is stored.
    pub fn get_bowing(&self, ternary: &TernaryId, param: Param) -> f64 {
        if !param.may_bow() {
            return 0.0;
        }
        self.bowings
            .get(&(ternary.clone(), param))
            .map_or(0.0, |e| e.b)
    }

    pub fn compounds(&self) -> impl Iterator<Item = &BinaryCompound> {
        self.compounds.values()
    }

    pub fn bowings(&self) -> impl Iterator<Item = &BowingEntry> {
        self.bowings.values()
    }

    pub fn len(&self) -> usize {
        self.compounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.compounds.is_empty()
    }

    pub fn temperature_note(&self) -> &str {
        &self.temperature_note
    }

    /// Back to an editable draft (canonical order).
    pub fn to_draft(&self) -> DatabaseDraft {
        DatabaseDraft {
            compounds: self.compounds.values().cloned().collect(),
            bowings: self.bowings.values().cloned().collect(),
            temperature_note: self.temperature_note.clone(),
        }
    }

    /// Canonical parameter-file text. Compounds and bowings are sorted and
    /// floats are written in shortest round-trip form, so
    /// `load_database(&db.serialize())` reproduces `db` exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if !self.temperature_note.is_empty() {
            out.push_str(&format!(
                "meta temperature={}\n",
                quote(&self.temperature_note)
            ));
        }
        for c in self.compounds.values() {
            out.push_str(&format!(
                "compound {} a={} eg_gamma={} eg_x={} eg_l={} delta_so={} e_p={} source={}\n",
                c.name,
                c.a,
                c.eg_gamma,
                c.eg_x,
                c.eg_l,
                c.delta_so,
                c.e_p,
                quote(&c.source_note)
            ));
        }
        for b in self.bowings.values() {
            out.push_str(&format!(
                "bowing {} {} b={} source={}\n",
                b.ternary,
                b.param,
                b.b,
                quote(&b.source_note)
            ));
        }
        out
    }
}

fn quote(text: &str) -> String {
    let mut s = String::with_capacity(text.len() + 2);
    s.push('"');
    for ch in text.chars() {
        if ch == '"' || ch == '\\' {
            s.push('\\');
        }
        s.push(ch);
    }
    s.push('"');
    s
}

/// Splits a record line on whitespace, keeping quoted spans intact.
fn tokenize(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut in_token = false;
    let mut chars = line.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '"' => {
                in_token = true;
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(esc) => current.push(esc),
                            None => return Err("dangling escape in quoted value".into()),
                        },
                        Some(c) => current.push(c),
                        None => return Err("unterminated quoted value".into()),
                    }
                }
            }
            c if c.is_whitespace() => {
                if in_token {
                    tokens.push(std::mem::take(&mut current));
                    in_token = false;
                }
            }
            c => {
                in_token = true;
                current.push(c);
            }
        }
    }
    if in_token {
        tokens.push(current);
    }
    Ok(tokens)
}

enum Record {
    Meta(String),
    Compound(BinaryCompound),
    Bowing(BowingEntry),
}

fn parse_record(tokens: &[String]) -> std::result::Result<Record, String> {
    let (kind, rest) = tokens.split_first().ok_or("empty record")?;
    match kind.as_str() {
        "meta" => {
            let mut kv = KeyValues::parse(rest)?;
            let note = kv.take("temperature")?;
            kv.finish()?;
            Ok(Record::Meta(note))
        }
        "compound" => {
            let (name, rest) = rest.split_first().ok_or("compound record needs a name")?;
            if name.contains('=') {
                return Err(format!("compound name expected before `{name}`"));
            }
            let mut kv = KeyValues::parse(rest)?;
            let c = BinaryCompound {
                name: name.clone(),
                a: kv.take_f64("a")?,
                eg_gamma: kv.take_f64("eg_gamma")?,
                eg_x: kv.take_f64("eg_x")?,
                eg_l: kv.take_f64("eg_l")?,
                delta_so: kv.take_f64("delta_so")?,
                e_p: kv.take_f64("e_p")?,
                source_note: kv.take("source")?,
            };
            kv.finish()?;
            Ok(Record::Compound(c))
        }
        "bowing" => {
            let [pair, param, rest @ ..] = rest else {
                return Err("bowing record needs `<A>/<B> <parameter>`".into());
            };
            let (a, b) = pair
                .split_once('/')
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .ok_or_else(|| format!("ternary id `{pair}` is not of the form A/B"))?;
            let param: Param = param.parse()?;
            if !param.may_bow() {
                return Err("lattice constant never bows (Vegard's law)".into());
            }
            let mut kv = KeyValues::parse(rest)?;
            let entry = BowingEntry {
                ternary: TernaryId::new(a, b),
                param,
                b: kv.take_f64("b")?,
                source_note: kv.take("source")?,
            };
            kv.finish()?;
            Ok(Record::Bowing(entry))
        }
        other => Err(format!("unknown record type `{other}`")),
    }
}

struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    fn parse(tokens: &[String]) -> std::result::Result<Self, String> {
        let mut map = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{tok}`"))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(format!("key `{k}` given twice"));
            }
        }
        Ok(KeyValues(map))
    }

    fn take(&mut self, key: &str) -> std::result::Result<String, String> {
        self.0.remove(key).ok_or_else(|| format!("missing `{key}`"))
    }

    fn take_f64(&mut self, key: &str) -> std::result::Result<f64, String> {
        let raw = self.take(key)?;
        raw.parse()
            .map_err(|_| format!("`{key}` is not a number: `{raw}`"))
    }

    fn finish(self) -> std::result::Result<(), String> {
        match self.0.keys().next() {
            Some(k) => Err(format!("unknown key `{k}`")),
            None => Ok(()),
        }
    }
}
