//! Reproduction report: each published number next to the computed value.

use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::crossing::{self, ParabolicParams};
use crate::field_mapping::{self, LabFields};
use crate::interferometer;
use crate::oracle::{self, HamiltonianSpec, IntegrationWindow};
use crate::spinor_gp::{self, SpeciesParams};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `|computed − reference| ≤ tolerance`.
    Abs,
    /// `|computed − reference| ≤ tolerance·|reference|`.
    Rel,
    /// `computed < reference`.
    Below,
    /// `computed ≥ reference`.
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub reference: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, reference: f64, computed: f64, tolerance: f64, relation: Relation) -> Self {
        let pass = match relation {
            Relation::Abs => (computed - reference).abs() <= tolerance,
            Relation::Rel => (computed - reference).abs() <= tolerance * reference.abs(),
            Relation::Below => computed < reference,
            Relation::AtLeast => computed >= reference,
        };
        Self {
            name: name.to_string(),
            reference,
            computed,
            tolerance,
            relation,
            pass,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One line per check.
    pub fn to_text(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{:<44} computed {:<14.6e} reference {:<12.6e} {:?} {:<9.3e} {}\n",
                    c.name,
                    c.computed,
                    c.reference,
                    c.relation,
                    c.tolerance,
                    if c.pass { "PASS" } else { "FAIL" }
                )
            })
            .collect()
    }
}

/// Builds the report; `with_oracle` adds the Schrödinger-integration checks
/// (about a second).
pub fn reproduction_report(with_oracle: bool) -> Result<Report> {
    let mut checks = Vec::new();

    let fields = LabFields::new(0.060, 0.300, 5e4, 0.5)?;
    let m = field_mapping::map_fields(&fields)?;
    checks.push(Check::new("field map: mu", 5.0, m.mu, 1e-12, Relation::Abs));
    checks.push(Check::new("field map: eps*mu", 10.0, m.eps_mu, 0.05, Relation::Rel));
    checks.push(Check::new("field map: eps", 2.0, m.epsilon, 0.05, Relation::Rel));
    checks.push(Check::new("field map: t_c (s)", 24e-6, m.t_c, 0.01, Relation::Rel));
    checks.push(Check::new("field map: t_z (s)", 2e-6, m.t_z, 0.15, Relation::Rel));
    checks.push(Check::new("field map: R", 0.78, m.r, 0.01, Relation::Rel));
    let ica = field_mapping::validate_ica_default(&m)?;
    checks.push(Check::new("field map: t_c/t_z", ica.margin, ica.ratio, 0.0, Relation::AtLeast));

    let rb = SpeciesParams::rb87();
    let gamma = spinor_gp::spin_mixing_rate_bound(&rb)?;
    checks.push(Check::new("Rb87 spin-mixing bound gamma (1/s)", 90.0, gamma, 10.0, Relation::Abs));
    checks.push(Check::new("gamma * 100 us", 0.01, gamma * 100e-6, 0.0, Relation::Below));

    checks.push(Check::new("LZ phase at Lambda=0", FRAC_PI_4, crossing::lz_phase(0.0)?, 1e-12, Relation::Abs));
    checks.push(Check::new("LZ phase at Lambda=20", 0.01, crossing::lz_phase(20.0)?, 0.0, Relation::Below));

    let r_opt = interferometer::optimal_splitting_amplitude()?;
    checks.push(Check::new("fringe amplitude maximised at R", FRAC_1_SQRT_2, r_opt, 1e-6, Relation::Abs));
    let ideal = InterferometerIdeal::evaluate()?;
    checks.push(Check::new("Psi=0 fringe minimum", 0.0, ideal.min, 1e-12, Relation::Abs));
    checks.push(Check::new("Psi=0 fringe maximum", 1.0, ideal.max, 1e-9, Relation::Abs));
    checks.push(Check::new(
        "sin^4 / sin^2 fringe width",
        1.0,
        ideal.width_ratio,
        0.0,
        Relation::Below,
    ));

    if with_oracle {
        let p = ParabolicParams::new(m.epsilon, m.mu)?;
        let window = IntegrationWindow::around_crossings(&p, oracle::DEFAULT_WINDOW_MULTIPLES)?;
        for (levels, label) in [(2, "ICA vs oracle: P(1->2)"), (3, "ICA vs oracle: P(1->3)")] {
            let c = oracle::compare_with_ica(&HamiltonianSpec::parabolic(p, levels)?, &window)?;
            checks.push(Check::new(label, c.p_ica, c.p_oracle, 0.02, Relation::Abs));
        }
    }
    Ok(Report { checks })
}

struct InterferometerIdeal {
    min: f64,
    max: f64,
    width_ratio: f64,
}

impl InterferometerIdeal {
    fn evaluate() -> Result<Self> {
        let c = interferometer::InterferometerConfig::new(FRAC_1_SQRT_2, 0.0, 0.0, 0.0, 0.0)?;
        let grid = interferometer::linspace(0.0, 2.0 * std::f64::consts::PI, 4001)?;
        let scan = interferometer::fringe_scan(&c, interferometer::Sweep::Chi, &grid)?;
        Ok(Self {
            min: scan.min(),
            max: scan.max(),
            width_ratio: interferometer::sharper_fringes_check(&c)?.ratio,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Check::new("a", 1.0, 1.05, 0.1, Relation::Abs).pass);
        assert!(!Check::new("a", 1.0, 1.2, 0.1, Relation::Rel).pass);
        assert!(Check::new("a", 1.0, 0.5, 0.0, Relation::Below).pass);
        assert!(!Check::new("a", 1.0, 0.5, 0.0, Relation::AtLeast).pass);
    }

    #[test]
    fn published_numbers_reproduce() {
        let r = reproduction_report(false).unwrap();
        assert!(r.all_pass(), "{}", r.to_text());
        assert!(r.checks.iter().any(|c| c.name.contains("gamma")));
        assert!(r.checks.iter().any(|c| c.name == "field map: R"));
    }
}
