//! CSV tables emitted by the CLI. Floats are written in Rust's shortest
//! round-trip decimal form, so parsing a table back yields bit-identical
//! values.

use std::io::{Read, Write};

use anyhow::{anyhow, bail, Context, Result};
use gfactor_core::{parse_composition, GapCharacter, SweepRow, SweepTable};

pub const SWEEP_HEADER: [&str; 7] = [
    "t",
    "composition",
    "a_angstrom",
    "eg_gamma_ev",
    "eg_min_ev",
    "character",
    "g",
];

pub const EXPERIMENTAL_HEADER: [&str; 4] = ["name", "a_angstrom", "g_or_eg", "source"];

/// Which quantity a figure plots against lattice constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
pub enum Panel {
    /// g-factor
    #[value(name = "A")]
    A,
    /// minimum of the Γ, X and L gaps
    #[value(name = "B")]
    B,
}

impl Panel {
    pub fn y_column(self) -> &'static str {
        match self {
            Panel::A => "g",
            Panel::B => "eg_min_ev",
        }
    }

    pub fn y_value(self, row: &SweepRow) -> f64 {
        match self {
            Panel::A => row.g,
            Panel::B => row.eg_min,
        }
    }
}

pub fn write_sweep<W: Write>(table: &SweepTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in &table.rows {
        w.write_record([
            r.t.to_string(),
            r.composition.to_string(),
            r.a.to_string(),
            r.eg_gamma.to_string(),
            r.eg_min.to_string(),
            r.character.to_string(),
            r.g.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep<R: Read>(input: R) -> Result<SweepTable> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SWEEP_HEADER {
        bail!("unexpected sweep header {header:?}");
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse().with_context(|| {
                format!("row {}: column {} is not a number", i + 1, SWEEP_HEADER[k])
            })
        };
        rows.push(SweepRow {
            t: num(0)?,
            composition: parse_composition(&rec[1])?,
            a: num(2)?,
            eg_gamma: num(3)?,
            eg_min: num(4)?,
            character: rec[5].parse()?,
            g: num(6)?,
        });
    }
    Ok(SweepTable { rows })
}

/// One figure curve: `t, composition, a_angstrom, character, <y>`, optionally
/// prefixed by a `path` column.
pub fn write_figure_rows<W: Write>(
    w: &mut csv::Writer<W>,
    panel: Panel,
    path_label: Option<&str>,
    table: &SweepTable,
) -> Result<()> {
    for r in &table.rows {
        let mut rec = Vec::with_capacity(6);
        if let Some(label) = path_label {
            rec.push(label.to_string());
        }
        rec.extend([
            r.t.to_string(),
            r.composition.to_string(),
            r.a.to_string(),
            r.character.to_string(),
            panel.y_value(r).to_string(),
        ]);
        w.write_record(&rec)?;
    }
    Ok(())
}

pub fn figure_header(panel: Panel, with_path: bool) -> Vec<&'static str> {
    let mut h = Vec::with_capacity(6);
    if with_path {
        h.push("path");
    }
    h.extend([
        "t",
        "composition",
        "a_angstrom",
        "character",
        panel.y_column(),
    ]);
    h
}

/// Parsed figure row, used to check emitted curves.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureRow {
    pub path: Option<String>,
    pub t: f64,
    pub composition: String,
    pub a: f64,
    pub character: GapCharacter,
    pub y: f64,
}

pub fn read_figure<R: Read>(input: R) -> Result<(Vec<String>, Vec<FigureRow>)> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let offset = usize::from(header.first().map(String::as_str) == Some("path"));
    if header.len() != 5 + offset {
        bail!("unexpected figure header {header:?}");
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |k: usize| -> Result<f64> {
            rec[k + offset]
                .parse()
                .map_err(|_| anyhow!("`{}` is not a number", &rec[k + offset]))
        };
        rows.push(FigureRow {
            path: (offset == 1).then(|| rec[0].to_string()),
            t: num(0)?,
            composition: rec[1 + offset].to_string(),
            a: num(2)?,
            character: rec[3 + offset].parse()?,
            y: num(4)?,
        });
    }
    Ok((header, rows))
}

/// Checks that an experimental-points file has the expected columns.
pub fn check_experimental(content: &[u8]) -> Result<()> {
    let mut r = csv::Reader::from_reader(content);
    let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != EXPERIMENTAL_HEADER {
        bail!(
            "experimental file must have columns {}, found {}",
            EXPERIMENTAL_HEADER.join(","),
            header.join(",")
        );
    }
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("experimental file row {}", i + 1))?;
        for k in [1, 2] {
            rec[k].trim().parse::<f64>().with_context(|| {
                format!(
                    "experimental file row {}: `{}` is not a number",
                    i + 1,
                    &rec[k]
                )
            })?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use gfactor_core::{default_database, lattice_matched_path, sweep_path, CompositionPath};

    #[test]
    fn sweep_csv_round_trips_bit_for_bit() {
        let db = default_database();
        for path in [
            lattice_matched_path(&"InGaAsP".parse().unwrap(), 5.86, &db).unwrap(),
            CompositionPath::linear("GaAs".parse().unwrap(), "InSb".parse().unwrap()).unwrap(),
        ] {
            let table = sweep_path(&path, 97, &db).unwrap();
            let mut buf = Vec::new();
            write_sweep(&table, &mut buf).unwrap();
            let back = read_sweep(buf.as_slice()).unwrap();
            assert_eq!(back, table);
            for (a, b) in back.rows.iter().zip(&table.rows) {
                assert_eq!(a.g.to_bits(), b.g.to_bits());
                assert_eq!(a.t.to_bits(), b.t.to_bits());
            }
        }
    }

    #[test]
    fn figure_rows_round_trip() {
        let db = default_database();
        let path =
            CompositionPath::linear("GaAs".parse().unwrap(), "InAs".parse().unwrap()).unwrap();
        let table = sweep_path(&path, 11, &db).unwrap();
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(figure_header(Panel::B, true)).unwrap();
            write_figure_rows(&mut w, Panel::B, Some("GaAs..InAs"), &table).unwrap();
        }
        let (header, rows) = read_figure(buf.as_slice()).unwrap();
        assert_eq!(header.last().unwrap(), "eg_min_ev");
        for (r, s) in rows.iter().zip(&table.rows) {
            assert_eq!(r.y.to_bits(), s.eg_min.to_bits());
            assert_eq!(r.composition, s.composition.to_string());
            assert_eq!(r.path.as_deref(), Some("GaAs..InAs"));
        }
    }

    #[test]
    fn experimental_header_checked() {
        assert!(check_experimental(b"name,a_angstrom,g_or_eg,source\nInP,5.86,1.2,ref\n").is_ok());
        assert!(check_experimental(b"name,a,g\nInP,5.86,1.2\n").is_err());
        assert!(check_experimental(b"name,a_angstrom,g_or_eg,source\nInP,five,1.2,ref\n").is_err());
    }
}
