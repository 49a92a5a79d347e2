use super::grid::{RadialGrid, ZetaGrid};
use super::profile::RadialProfile;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A single vertical mode: an integer atom or a node of the continuous ζ-grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum ModeKey {
    Atom(i64),
    Density(usize),
}

/// A measure `g(ζ) dζ + Σ_m a_m δ_m` with values in radial profiles.
///
/// Coefficients multiply `e^{iζz}`, so the physical field is
/// `Σ_m a_m(r) e^{imz} + ∫ g(r, ζ) e^{iζz} dζ`. The density is sampled on a
/// [`ZetaGrid`] and integrated with its trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    grid: Arc<RadialGrid>,
    zeta: Option<Arc<ZetaGrid>>,
    density: Vec<RadialProfile>,
    atoms: BTreeMap<i64, RadialProfile>,
}

impl SpectralMeasure {
    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        Self { grid, zeta: None, density: Vec::new(), atoms: BTreeMap::new() }
    }

    pub fn atom(grid: Arc<RadialGrid>, m: i64, profile: RadialProfile) -> Result<Self> {
        let mut out = Self::zero(grid);
        out.add_atom(m, profile)?;
        Ok(out)
    }

    pub fn from_parts(
        grid: Arc<RadialGrid>,
        zeta: Option<Arc<ZetaGrid>>,
        density: Vec<RadialProfile>,
        atoms: BTreeMap<i64, RadialProfile>,
    ) -> Result<Self> {
        match &zeta {
            Some(z) if z.len() != density.len() => {
                return Err(Error::GridMismatch(format!(
                    "{} density profiles for {} zeta nodes",
                    density.len(),
                    z.len()
                )))
            }
            None if !density.is_empty() => {
                return Err(Error::GridMismatch("density given without a zeta grid".into()))
            }
            _ => {}
        }
        for p in density.iter().chain(atoms.values()) {
            if **p.grid() != *grid {
                return Err(Error::GridMismatch("profile grid differs from measure grid".into()));
            }
        }
        Ok(Self { grid, zeta, density, atoms })
    }

    /// Adds `profile` to the coefficient of `δ_m`.
    pub fn add_atom(&mut self, m: i64, profile: RadialProfile) -> Result<()> {
        if **profile.grid() != *self.grid {
            return Err(Error::GridMismatch("atom profile grid differs from measure grid".into()));
        }
        let merged = match self.atoms.remove(&m) {
            Some(old) => old.add(&profile)?,
            None => profile,
        };
        self.atoms.insert(m, merged);
        Ok(())
    }

    /// Adds `profile·w(ζ)` to the density, creating it on `zeta` if absent.
    pub fn add_density<W: Fn(f64) -> f64>(&mut self, zeta: Arc<ZetaGrid>, profile: &RadialProfile, w: W) -> Result<()> {
        self.ensure_density(&zeta)?;
        for (j, &z) in zeta.nodes().iter().enumerate() {
            let c = w(z);
            if c != 0.0 {
                self.density[j] = self.density[j].axpy(Complex64::new(c, 0.0), profile)?;
            }
        }
        Ok(())
    }

    fn ensure_density(&mut self, zeta: &Arc<ZetaGrid>) -> Result<()> {
        match &self.zeta {
            Some(z) if **z != **zeta => Err(Error::GridMismatch("different zeta grids".into())),
            Some(_) => Ok(()),
            None => {
                self.zeta = Some(zeta.clone());
                self.density = vec![RadialProfile::zeros(self.grid.clone()); zeta.len()];
                Ok(())
            }
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn zeta_grid(&self) -> Option<&Arc<ZetaGrid>> {
        self.zeta.as_ref()
    }

    pub fn density(&self) -> &[RadialProfile] {
        &self.density
    }

    pub fn atoms(&self) -> &BTreeMap<i64, RadialProfile> {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.values().all(|p| p.is_zero()) && self.density.iter().all(|p| p.is_zero())
    }

    /// All modes carried by the measure, atoms first.
    pub fn modes(&self) -> Vec<ModeKey> {
        let mut out: Vec<ModeKey> = self.atoms.keys().map(|&m| ModeKey::Atom(m)).collect();
        out.extend((0..self.density.len()).map(ModeKey::Density));
        out
    }

    /// Vertical frequency of a mode.
    pub fn frequency(&self, key: ModeKey) -> f64 {
        match key {
            ModeKey::Atom(m) => m as f64,
            ModeKey::Density(j) => self.zeta.as_ref().map(|z| z.nodes()[j]).unwrap_or(f64::NAN),
        }
    }

    pub fn profile(&self, key: ModeKey) -> Option<&RadialProfile> {
        match key {
            ModeKey::Atom(m) => self.atoms.get(&m),
            ModeKey::Density(j) => self.density.get(j),
        }
    }

    /// Builds a measure with the same support, mapping each mode's profile.
    pub fn map_modes<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(ModeKey, f64, &RadialProfile) -> Result<RadialProfile> + Sync,
    {
        let atoms = self
            .atoms
            .iter()
            .map(|(&m, p)| Ok((m, f(ModeKey::Atom(m), m as f64, p)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let density = match &self.zeta {
            Some(z) => self
                .density
                .iter()
                .enumerate()
                .map(|(j, p)| f(ModeKey::Density(j), z.nodes()[j], p))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        Ok(Self { grid: self.grid.clone(), zeta: self.zeta.clone(), density, atoms })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_modes(|_, _, p| Ok(p.scale(c))).expect("scaling cannot fail")
    }

    pub fn add(&self, other: &SpectralMeasure) -> Result<Self> {
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch("measures live on different radial grids".into()));
        }
        let mut out = self.clone();
        for (&m, p) in &other.atoms {
            out.add_atom(m, p.clone())?;
        }
        if let Some(z) = &other.zeta {
            out.ensure_density(z)?;
            for (j, p) in other.density.iter().enumerate() {
                out.density[j] = out.density[j].add(p)?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralMeasure) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `‖g‖_{L¹(L∞_ρ)} + Σ_m ‖a_m‖_{L∞_ρ}`.
    pub fn x_norm(&self, rho: f64) -> f64 {
        let atoms: f64 = self.atoms.values().map(|p| p.weighted_sup_norm(rho)).sum();
        let dens: f64 = match &self.zeta {
            Some(z) => self
                .density
                .iter()
                .zip(z.weights())
                .map(|(p, w)| if p.is_zero() { 0.0 } else { w * p.weighted_sup_norm(rho) })
                .sum(),
            None => 0.0,
        };
        atoms + dens
    }

    /// Spectral form of `∂_z`: multiplies by `iζ` (`im` on atoms).
    pub fn z_derivative(&self) -> Self {
        self.map_modes(|_, zeta, p| Ok(p.scale(Complex64::new(0.0, zeta))))
            .expect("multiplier cannot fail")
    }

    /// Density value at an arbitrary `ζ` by linear interpolation, zero
    /// outside the ζ-grid.
    fn density_at(&self, zeta: f64) -> Result<Option<RadialProfile>> {
        let z = match &self.zeta {
            Some(z) => z,
            None => return Ok(None),
        };
        match z.locate(zeta) {
            None => Ok(None),
            Some((j, lam)) => {
                if lam == 0.0 {
                    Ok(Some(self.density[j].clone()))
                } else {
                    Ok(Some(RadialProfile::lerp(&self.density[j], &self.density[j + 1], lam)?))
                }
            }
        }
    }

    /// Convolution of measures, the spectral image of the pointwise product of
    /// the physical fields. Radial coefficients multiply pointwise.
    ///
    /// Density mass translated or convolved beyond the ζ-grid is dropped.
    pub fn convolve(&self, other: &SpectralMeasure) -> Result<Self> {
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch("cannot convolve measures on different radial grids".into()));
        }
        if let (Some(a), Some(b)) = (&self.zeta, &other.zeta) {
            if **a != **b {
                return Err(Error::GridMismatch("cannot convolve densities on different zeta grids".into()));
            }
        }
        let mut out = SpectralMeasure::zero(self.grid.clone());
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (&k, a) in &self.atoms {
            for (&l, b) in &other.atoms {
                out.add_atom(k + l, a.mul(b)?)?;
            }
        }
        let zeta = match self.zeta.as_ref().or(other.zeta.as_ref()) {
            Some(z) => z.clone(),
            None => return Ok(out),
        };
        let nodes = zeta.nodes().to_vec();
        let weights = zeta.weights().to_vec();
        let density: Vec<RadialProfile> = nodes
            .par_iter()
            .map(|&xi| -> Result<RadialProfile> {
                let mut acc = RadialProfile::zeros(self.grid.clone());
                // atom × density: a_m τ_m g with (τ_m g)(ξ) = g(ξ − m)
                for (&m, a) in &self.atoms {
                    if let Some(g) = other.density_at(xi - m as f64)? {
                        acc = acc.add(&a.mul(&g)?)?;
                    }
                }
                for (&m, b) in &other.atoms {
                    if let Some(g) = self.density_at(xi - m as f64)? {
                        acc = acc.add(&g.mul(b)?)?;
                    }
                }
                // density ⋆ density by trapezoid quadrature in ζ
                if !self.density.is_empty() && !other.density.is_empty() {
                    for (l, &zl) in nodes.iter().enumerate() {
                        if other.density[l].is_zero() {
                            continue;
                        }
                        if let Some(g) = self.density_at(xi - zl)? {
                            acc = acc.add(&g.mul(&other.density[l])?.scale_real(weights[l]))?;
                        }
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        out.zeta = Some(zeta);
        out.density = density;
        Ok(out)
    }

    /// Physical value `Σ a_m(r) e^{imz} + ∫ g(r,ζ) e^{iζz} dζ` with cubic
    /// radial interpolation.
    pub fn reconstruct(&self, r: f64, z: f64) -> Result<Complex64> {
        self.grid.locate(r)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&m, a) in &self.atoms {
            acc += a.eval(r)? * Complex64::from_polar(1.0, m as f64 * z);
        }
        if let Some(zg) = &self.zeta {
            for ((g, &zeta), &w) in self.density.iter().zip(zg.nodes()).zip(zg.weights()) {
                if !g.is_zero() {
                    acc += g.eval(r)? * Complex64::from_polar(w, zeta * z);
                }
            }
        }
        Ok(acc)
    }

    /// Projects a `2π`-periodic field onto atoms `|m| ≤ m_max` by the discrete
    /// Fourier transform on `nz` equispaced points, the inverse of
    /// [`reconstruct`](Self::reconstruct) on band-limited fields.
    pub fn project_periodic<F>(grid: Arc<RadialGrid>, f: F, m_max: i64, nz: usize, tail_exponent: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        if nz < (2 * m_max + 1) as usize {
            return Err(Error::Validation(format!("{nz} z-samples cannot resolve |m| <= {m_max}")));
        }
        let zs: Vec<f64> = (0..nz).map(|k| 2.0 * std::f64::consts::PI * k as f64 / nz as f64).collect();
        let samples: Vec<Vec<Complex64>> = grid.nodes().iter().map(|&r| zs.iter().map(|&z| f(r, z)).collect()).collect();
        let mut out = Self::zero(grid.clone());
        for m in -m_max..=m_max {
            let values = samples
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&zs)
                        .map(|(v, &z)| v * Complex64::from_polar(1.0, -(m as f64) * z))
                        .sum::<Complex64>()
                        / nz as f64
                })
                .collect();
            let p = RadialProfile::new(grid.clone(), values, tail_exponent)?;
            if !p.is_zero() {
                out.atoms.insert(m, p);
            }
        }
        Ok(out)
    }

    /// Checks `a_{-m} = conj(a_m)` and `g(-ζ) = conj(g(ζ))` up to `tol`
    /// relative to the largest coefficient.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self
            .atoms
            .values()
            .chain(self.density.iter())
            .map(|p| p.max_abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let close = |a: &RadialProfile, b: Option<&RadialProfile>| -> bool {
            match b {
                Some(b) => a.values().iter().zip(b.values()).all(|(x, y)| (x - y.conj()).norm() <= tol * scale),
                None => a.max_abs() <= tol * scale,
            }
        };
        let atoms_ok = self.atoms.iter().all(|(&m, a)| close(a, self.atoms.get(&-m)));
        let dens_ok = match &self.zeta {
            Some(z) => (0..self.density.len()).all(|j| close(&self.density[j], self.density.get(z.mirror(j)))),
            None => true,
        };
        atoms_ok && dens_ok
    }

    /// Drops atoms with `|m| > m_max`; returns the truncated measure and the
    /// `X(L∞_ρ)` norm of what was removed.
    pub fn truncate_atoms(&self, m_max: i64, rho: f64) -> (Self, f64) {
        let mut kept = self.clone();
        let mut dropped = 0.0;
        kept.atoms.retain(|&m, p| {
            if m.abs() > m_max {
                dropped += p.weighted_sup_norm(rho);
                false
            } else {
                true
            }
        });
        (kept, dropped)
    }

    /// Removes atoms that are exactly zero.
    pub fn prune(mut self) -> Self {
        self.atoms.retain(|_, p| !p.is_zero());
        self
    }
}
