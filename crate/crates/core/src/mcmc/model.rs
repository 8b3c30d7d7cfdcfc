use crate::error::{Error, Result};
use crate::fem::{
    build_grid, build_h, build_interpolation, build_q_global, build_r,
    weighted_second_difference_precision, Grid, InterpolationMatrix, MIN_SUBKNOTS,
};
use crate::{BandedMatrix64, Grid64, Interpolation64, TriDiag64};

use super::spec::{KnotPolicy, ModelSpec, Variant, DEFAULT_SDE2_SUBKNOTS};

/// Data plus every fixed matrix a chain needs, assembled once.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ModelSpec,
    /// Observation locations and responses, `N_obs` each.
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub grid: Grid64,
    /// `Ψ`: spline basis at the observations (`N_obs × n`).
    pub psi: Interpolation64,
    pub h: TriDiag64,
    /// Lumped mass diagonal `B̃`.
    pub mass: Vec<f64>,
    pub inv_mass: Vec<f64>,
    pub q_global: BandedMatrix64,
    /// Mesh of the ν basis.
    pub subgrid: Grid64,
    /// `Ω`: ν basis at the knots (`n × m`).
    pub omega: Interpolation64,
    /// ν-prior precision on the subgrid.
    pub r: BandedMatrix64,
    pub kappa: f64,
    /// Per ν-basis function, the inclusive range of knots it touches.
    pub omega_support: Vec<(usize, usize)>,
}

impl Model {
    pub fn new(spec: &ModelSpec, t: &[f64], y: &[f64]) -> Result<Self> {
        spec.validate()?;
        if t.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: t.len(), got: y.len() });
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite response at index {i}")));
        }
        let data_grid = build_grid(t)?;
        let grid = match spec.knots {
            KnotPolicy::AtData => data_grid,
            KnotPolicy::Regular(m) => Grid::regular(data_grid.first(), data_grid.last(), m)?,
        };
        let n = grid.len();
        let psi = build_interpolation(t, &grid)?;
        let h = build_h(&grid);
        let mass = crate::fem::build_btilde(&grid).diag().to_vec();
        let inv_mass: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();
        let q_global = build_q_global(&grid);

        let m = match (spec.variant, spec.subknots) {
            (_, Some(m)) => m,
            (Variant::AdaptiveSde2, None) => DEFAULT_SDE2_SUBKNOTS.min(n),
            _ => n,
        };
        if m < MIN_SUBKNOTS || m > n {
            return Err(Error::InvalidInput(format!(
                "subknot count {m} must lie in [{MIN_SUBKNOTS}, {n}]"
            )));
        }
        let subgrid = grid.quantile_subgrid(m)?;
        let omega = if m == n {
            InterpolationMatrix::identity(n)
        } else {
            build_interpolation(grid.knots(), &subgrid)?
        };
        let kappa = spec
            .kappa
            .unwrap_or_else(|| default_kappa(grid.first(), grid.last()));
        let r = build_r(&subgrid, kappa)?;
        let omega_support = support_ranges(&omega);

        Ok(Self {
            spec: spec.clone(),
            t: t.to_vec(),
            y: y.to_vec(),
            grid,
            psi,
            h,
            mass,
            inv_mass,
            q_global,
            subgrid,
            omega,
            r,
            kappa,
            omega_support,
        })
    }

    pub fn n_knots(&self) -> usize {
        self.grid.len()
    }

    pub fn n_obs(&self) -> usize {
        self.y.len()
    }

    pub fn n_subknots(&self) -> usize {
        self.subgrid.len()
    }

    pub fn variant(&self) -> Variant {
        self.spec.variant
    }

    /// `ν = Ω γ`
    pub fn nu(&self, gamma: &[f64]) -> Vec<f64> {
        self.omega.apply(gamma).expect("gamma sized to the subgrid")
    }

    /// Spline precision `Q_λ` for log-smoothing values `ν` at the knots.
    pub fn precision(&self, nu: &[f64]) -> BandedMatrix64 {
        match self.spec.variant {
            Variant::Global => self.q_global.clone(),
            Variant::AdaptiveSde1 => {
                let weights: Vec<f64> = nu
                    .iter()
                    .zip(&self.inv_mass)
                    .map(|(v, im)| v.exp() * im)
                    .collect();
                weighted_second_difference_precision(&self.h, &weights)
                    .expect("weights sized to the grid")
            }
            Variant::AdaptiveSde2 => {
                let lam: Vec<f64> = nu.iter().map(|v| v.exp()).collect();
                self.q_global
                    .congruence_diag(&lam)
                    .expect("lambda sized to the grid")
            }
        }
    }
}

/// Smoothing function `λ(t)` from the log-scale field the sampler works in.
/// Under SDE-I the field is the log of the local precision multiplier
/// `λ²`, under SDE-II it is `log λ` itself.
pub fn lambda_from_nu(variant: Variant, nu: f64) -> f64 {
    match variant {
        Variant::Global => 1.0,
        Variant::AdaptiveSde1 => (0.5 * nu).exp(),
        Variant::AdaptiveSde2 => nu.exp(),
    }
}

pub fn default_kappa(lo: f64, hi: f64) -> f64 {
    2.0 / (hi - lo)
}

fn support_ranges(omega: &Interpolation64) -> Vec<(usize, usize)> {
    let m = omega.ncols();
    let mut ranges = vec![(usize::MAX, 0usize); m];
    for r in 0..omega.nrows() {
        for (c, _) in omega.row_entries(r) {
            let e = &mut ranges[c];
            e.0 = e.0.min(r);
            e.1 = e.1.max(r);
        }
    }
    ranges
}
