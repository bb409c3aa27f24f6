//! Datasets behind the three figures: normalized `|Ψ_n|²` for a harmonic
//! reference and three deformations per figure, ground state in panel (a) and
//! first excited state in panel (b).

use std::path::{Path, PathBuf};

use crate::deformation::Deformation;
use crate::error::{Error, Result};
use crate::spectral::{support_estimate, DensityOptions};
use crate::wavefunction::{probability_density, ProbabilityDensity};

use super::output::{Format, Table};

pub const PANELS: [&str; 6] = ["1a", "1b", "2a", "2b", "3a", "3b"];

/// Default plotting window before clipping.
pub const FIGURE_RANGE: (f64, f64) = (-4.0, 4.0);
pub const FIGURE_POINTS: usize = 801;

/// Column label and deformation for every curve of a figure.
pub fn figure_curves(figure: char) -> Result<Vec<(String, Deformation)>> {
    let mut curves = vec![("harmonic".to_string(), Deformation::HARMONIC)];
    match figure {
        '1' => {
            for q in [0.9, 0.8, 0.3] {
                curves.push((format!("q{q:.2}"), Deformation::math_q(q)?));
            }
        }
        '2' => {
            for q in [1.1, 1.5, 1.9] {
                curves.push((format!("q{q:.1}"), Deformation::physics_q(q)?));
            }
        }
        '3' => {
            for p in [1.3, 1.5, 1.9] {
                curves.push((format!("p{p:.1}_q0.5"), Deformation::pq(p, 0.5)?));
            }
        }
        other => return Err(Error::InvalidInput(format!("unknown figure {other}"))),
    }
    Ok(curves)
}

#[derive(Debug, Clone)]
pub struct FigurePanel {
    pub which: String,
    pub level: usize,
    pub grid: Vec<f64>,
    pub curves: Vec<(String, ProbabilityDensity)>,
}

impl FigurePanel {
    pub fn curve(&self, label: &str) -> Option<&ProbabilityDensity> {
        self.curves.iter().find(|(l, _)| l == label).map(|(_, d)| d)
    }

    pub fn to_table(&self) -> Table {
        let mut columns = vec!["x".to_string()];
        columns.extend(self.curves.iter().map(|(label, _)| label.clone()));
        let mut table = Table::new(columns);
        table
            .meta("figure", self.which.clone())
            .meta("level", self.level)
            .meta("grid", format!("[{}, {}] x {}", self.grid[0], self.grid[self.grid.len() - 1], self.grid.len()))
            .meta(
                "grid_rule",
                "default [-4, 4]; clipped to the union of support estimates when every curve has bounded support",
            );
        for (label, d) in &self.curves {
            table.meta(
                label,
                format!(
                    "{} levels={} method={} eta={} normalization={}",
                    d.deformation.spec(),
                    d.levels,
                    d.method,
                    d.eta,
                    d.normalization
                ),
            );
        }
        for (i, &x) in self.grid.iter().enumerate() {
            let mut row = vec![x];
            row.extend(self.curves.iter().map(|(_, d)| d.density[i]));
            table.push(row);
        }
        table
    }
}

fn parse_panel(which: &str) -> Result<(char, usize)> {
    if !PANELS.contains(&which) {
        return Err(Error::InvalidInput(format!(
            "unknown figure panel {which:?}; expected one of {}",
            PANELS.join(", ")
        )));
    }
    let mut chars = which.chars();
    let figure = chars.next().unwrap();
    let level = if chars.next() == Some('a') { 0 } else { 1 };
    Ok((figure, level))
}

fn figure_grid(curves: &[(String, Deformation)], levels: usize, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidInput(format!("a figure grid needs at least 2 points, got {points}")));
    }
    let (mut lo, mut hi) = FIGURE_RANGE;
    let supports = curves.iter().map(|(_, d)| support_estimate(d, levels)).collect::<Result<Vec<_>>>()?;
    if supports.iter().all(|s| s.bounded) {
        let s_lo = supports.iter().map(|s| s.lo).fold(f64::INFINITY, f64::min);
        let s_hi = supports.iter().map(|s| s.hi).fold(f64::NEG_INFINITY, f64::max);
        lo = lo.max(s_lo);
        hi = hi.min(s_hi);
    }
    Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect())
}

pub fn figure_panel(which: &str, levels: usize, points: usize) -> Result<FigurePanel> {
    let (figure, level) = parse_panel(which)?;
    let curves = figure_curves(figure)?;
    let grid = figure_grid(&curves, levels, points)?;
    let curves = curves
        .into_iter()
        .map(|(label, def)| Ok((label, probability_density(&def, level, &grid, levels, &DensityOptions::default())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FigurePanel { which: which.to_string(), level, grid, curves })
}

/// Path of the file written for a panel.
pub fn panel_path(outdir: &Path, which: &str, format: Format) -> PathBuf {
    outdir.join(format!("fig{which}.{}", format.extension()))
}
