//! Parameter interpolation across binary, ternary and quaternary alloys.
//!
//! Every parameter is the bilinear sum over corner binaries, weighted by the
//! product of sublattice fractions. Energy parameters additionally subtract a
//! quadratic bowing term for every ternary edge:
//!
//! ```text
//! P = Σ w_c·w_an·P(c an)  −  Σ_edges w_shared · x·(1−x) · b_edge
//! ```
//!
//! where `x, 1−x` are the fractions of the two mixed elements on the edge and
//! `w_shared` the fraction of the common element on the other sublattice. For
//! a ternary this is `P_A(1−x) + P_B·x − x(1−x)·b`. The lattice constant
//! never bows.

use serde::Serialize;

use crate::composition::{binary_name, Composition};
use crate::error::Result;
use crate::params::{MaterialsDatabase, Param, TernaryId};

/// Interpolated material parameters of one composition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlloyParams {
    /// Lattice constant, Å.
    pub a: f64,
    pub eg_gamma: f64,
    pub eg_x: f64,
    pub eg_l: f64,
    pub delta_so: f64,
    pub e_p: f64,
}

impl AlloyParams {
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

    /// Smallest of the Γ, X and L gaps.
    pub fn eg_min(&self) -> f64 {
        self.eg_gamma.min(self.eg_x).min(self.eg_l)
    }
}

/// Vegard's-law lattice constant, Å.
pub fn lattice_constant(comp: &Composition, db: &MaterialsDatabase) -> Result<f64> {
    linear_part(comp, db, Param::LatticeConstant)
}

/// Interpolated value of one parameter, including edge bowing for energies.
pub fn interpolate_param(comp: &Composition, db: &MaterialsDatabase, param: Param) -> Result<f64> {
    let linear = linear_part(comp, db, param)?;
    if !param.may_bow() {
        return Ok(linear);
    }
    Ok(linear - bowing_part(comp, db, param)?)
}

pub fn alloy_params(comp: &Composition, db: &MaterialsDatabase) -> Result<AlloyParams> {
    Ok(AlloyParams {
        a: lattice_constant(comp, db)?,
        eg_gamma: interpolate_param(comp, db, Param::EgGamma)?,
        eg_x: interpolate_param(comp, db, Param::EgX)?,
        eg_l: interpolate_param(comp, db, Param::EgL)?,
        delta_so: interpolate_param(comp, db, Param::DeltaSo)?,
        e_p: interpolate_param(comp, db, Param::Ep)?,
    })
}

fn linear_part(comp: &Composition, db: &MaterialsDatabase, param: Param) -> Result<f64> {
    let mut sum = 0.0;
    for (c, an, w) in comp.binaries() {
        sum += w * db.binary(&binary_name(c, an))?.get(param);
    }
    Ok(sum)
}

fn bowing_part(comp: &Composition, db: &MaterialsDatabase, param: Param) -> Result<f64> {
    let cations: Vec<_> = comp.cations().collect();
    let anions: Vec<_> = comp.anions().collect();
    let mut sum = 0.0;
    // Mixed cations, one edge per anion.
    if let [(c1, x1), (c2, x2)] = cations[..] {
        for &(an, w) in &anions {
            let edge = TernaryId::new(binary_name(c1, an), binary_name(c2, an));
            sum += w * x1 * x2 * edge_bowing(db, &edge, param)?;
        }
    }
    // Mixed anions, one edge per cation.
    if let [(a1, y1), (a2, y2)] = anions[..] {
        for &(c, w) in &cations {
            let edge = TernaryId::new(binary_name(c, a1), binary_name(c, a2));
            sum += w * y1 * y2 * edge_bowing(db, &edge, param)?;
        }
    }
    Ok(sum)
}

fn edge_bowing(db: &MaterialsDatabase, edge: &TernaryId, param: Param) -> Result<f64> {
    // Endpoints must exist even when no bowing is stored.
    db.binary(edge.first())?;
    db.binary(edge.second())?;
    Ok(db.get_bowing(edge, param))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{parse_composition, Anion, Cation};
    use crate::params::{default_database, load_database};

    fn comp(s: &str) -> Composition {
        parse_composition(s).unwrap()
    }

    fn edge_db(b: f64) -> MaterialsDatabase {
        load_database(&format!(
            "compound GaAs a=5.6 eg_gamma=1.5 eg_x=2.0 eg_l=1.8 delta_so=0.34 e_p=28.8 source=\"t\"\n\
             compound InAs a=6.0 eg_gamma=0.5 eg_x=1.4 eg_l=1.1 delta_so=0.38 e_p=21.5 source=\"t\"\n\
             bowing GaAs/InAs eg_gamma b={b} source=\"t\"\n"
        ))
        .unwrap()
    }

    #[test]
    fn inp_lattice_constant() {
        let db = default_database();
        assert_eq!(lattice_constant(&comp("InP"), &db).unwrap(), 5.86);
    }

    #[test]
    fn vegard_midpoint_is_mean() {
        let db = default_database();
        let a = lattice_constant(&comp("Ga0.5In0.5As"), &db).unwrap();
        let mean = (db.get_binary("GaAs").unwrap().a + db.get_binary("InAs").unwrap().a) / 2.0;
        assert!((a - mean).abs() < 1e-12);
    }

    #[test]
    fn gainas_close_to_inp_lattice() {
        let db = default_database();
        // 0.47 * 5.64177 + 0.53 * 6.0502
        let expected = 0.47 * 5.64177 + 0.53 * 6.0502;
        let a = lattice_constant(&comp("Ga0.47In0.53As"), &db).unwrap();
        assert!((a - expected).abs() < 1e-12);
        assert!((a - 5.86).abs() < 0.015, "{a}");
    }

    #[test]
    fn ternary_endpoints_are_exact() {
        let db = edge_db(0.4);
        let gaas =
            Composition::new([(Cation::Ga, 1.0), (Cation::In, 0.0)], [(Anion::As, 1.0)]).unwrap();
        assert_eq!(interpolate_param(&gaas, &db, Param::EgGamma).unwrap(), 1.5);
    }

    #[test]
    fn ternary_midpoint_without_bowing_is_mean() {
        let db = edge_db(0.0);
        let v = interpolate_param(&comp("Ga0.5In0.5As"), &db, Param::EgGamma).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn ternary_midpoint_bowing() {
        let db = edge_db(0.4);
        let v = interpolate_param(&comp("Ga0.5In0.5As"), &db, Param::EgGamma).unwrap();
        // mean 1.0, minus 0.5 * 0.5 * 0.4
        assert!((v - 0.9).abs() < 1e-15, "{v}");
        // delta and e_p stay linear
        let d = interpolate_param(&comp("Ga0.5In0.5As"), &db, Param::DeltaSo).unwrap();
        assert!((d - 0.36).abs() < 1e-15);
    }

    #[test]
    fn binary_params_equal_record() {
        let db = default_database();
        let rec = db.get_binary("InP").unwrap();
        let p = alloy_params(&comp("InP"), &db).unwrap();
        for param in Param::ALL {
            assert_eq!(p.get(param), rec.get(param), "{param}");
        }
    }

    #[test]
    fn gainas_gap_near_telecom_band() {
        let db = default_database();
        let p = alloy_params(&comp("Ga0.47In0.53As"), &db).unwrap();
        // 0.47*1.519 + 0.53*0.417 - 0.47*0.53*0.477
        let expected = 0.47 * 1.519 + 0.53 * 0.417 - 0.47 * 0.53 * 0.477;
        assert!((p.eg_gamma - expected).abs() < 1e-12);
        assert!((0.75..=0.85).contains(&p.eg_gamma), "{}", p.eg_gamma);
    }

    #[test]
    fn quaternary_matches_hand_sum() {
        let db = default_database();
        let (x, y) = (0.7, 0.4);
        let c = Composition::new(
            [(Cation::In, x), (Cation::Ga, 1.0 - x)],
            [(Anion::As, y), (Anion::P, 1.0 - y)],
        )
        .unwrap();
        let g = |n: &str| db.get_binary(n).unwrap().eg_gamma;
        let hand = x * y * g("InAs")
            + x * (1.0 - y) * g("InP")
            + (1.0 - x) * y * g("GaAs")
            + (1.0 - x) * (1.0 - y) * g("GaP")
            - x * (1.0 - x) * (y * 0.477 + (1.0 - y) * 0.65)
            - y * (1.0 - y) * (x * 0.10 + (1.0 - x) * 0.19);
        let v = interpolate_param(&c, &db, Param::EgGamma).unwrap();
        assert!((v - hand).abs() < 1e-12, "{v} vs {hand}");
    }

    #[test]
    fn missing_corner_binary() {
        let db = edge_db(0.0);
        assert!(alloy_params(&comp("InP"), &db).is_err());
        assert!(alloy_params(&comp("Ga0.5In0.5As0.5P0.5"), &db).is_err());
    }
}
