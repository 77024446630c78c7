//! A free particle on a periodic position grid, used as a fully quantum clock
//! whose reading is the particle's position.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::clock::{ClockModel, PeakMap};
use crate::error::{invalid, Result};
use crate::operator::{ComplexMatrix, DensityMatrix, HermitianOperator};

/// Gaussian wavepacket `exp(-(x - start)^2 / (4 width^2) + i momentum x)` of
/// a particle of mass `mass` on `n` equally spaced sites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeParticleClock {
    pub n: usize,
    pub spacing: f64,
    pub mass: f64,
    /// Initial position standard deviation.
    pub width: f64,
    pub momentum: f64,
    pub start: f64,
}

impl FreeParticleClock {
    /// 256 sites of spacing 0.5 centred on the origin; the packet moves at
    /// unit speed.
    pub fn standard() -> Self {
        Self {
            n: 256,
            spacing: 0.5,
            mass: 5.0,
            width: 4.0,
            momentum: 5.0,
            start: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(invalid(
                "n",
                format!("need an even number of sites >= 4, got {}", self.n),
            ));
        }
        for (name, v) in [("spacing", self.spacing), ("mass", self.mass), ("width", self.width)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.momentum > 0.0 && self.momentum.is_finite()) {
            return Err(invalid("momentum", format!("must be positive, got {}", self.momentum)));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.spacing
    }

    /// Sites `-L/2, -L/2 + dx, ..., L/2 - dx`.
    pub fn positions(&self) -> Vec<f64> {
        let x0 = -0.5 * self.length();
        (0..self.n).map(|j| x0 + j as f64 * self.spacing).collect()
    }

    /// Kinetic energy `p^2 / 2m` with the exact spectral derivative, a
    /// circulant matrix in the position basis.
    pub fn hamiltonian(&self) -> HermitianOperator {
        let n = self.n;
        let dk = 2.0 * PI / self.length();
        let wavenumbers: Vec<f64> = (0..n)
            .map(|m| {
                let m = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
                m * dk
            })
            .collect();
        let column: Vec<C64> = (0..n)
            .map(|d| {
                wavenumbers
                    .iter()
                    .map(|&k| {
                        let e = k * k / (2.0 * self.mass);
                        e * C64::from_polar(1.0, k * d as f64 * self.spacing)
                    })
                    .sum::<C64>()
                    / n as f64
            })
            .collect();
        let m = ComplexMatrix::from_fn(n, |i, j| column[(i + n - j) % n]);
        HermitianOperator::new(m.hermitian_part()).expect("circulant kinetic operator")
    }

    pub fn position_operator(&self) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&self.positions())
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        self.validate()?;
        let psi: Vec<C64> = self
            .positions()
            .iter()
            .map(|&x| {
                let u = x - self.start;
                C64::from_polar((-u * u / (4.0 * self.width * self.width)).exp(), self.momentum * x)
            })
            .collect();
        DensityMatrix::pure(&psi)
    }

    pub fn velocity(&self) -> f64 {
        self.momentum / self.mass
    }

    /// Free-particle position spread after ideal time `t`.
    pub fn spread(&self, t: f64) -> f64 {
        let tau = 2.0 * self.mass * self.width * self.width;
        self.width * (1.0 + (t / tau).powi(2)).sqrt()
    }

    /// Gaussian reading distribution that the packet approximates: readings
    /// peak at `start + v t` with the spread at the ideal time the packet
    /// passes the reading.
    pub fn gaussian_model(&self) -> Result<ClockModel> {
        self.validate()?;
        let this = *self;
        let v = self.velocity();
        ClockModel::gaussian_with(Arc::new(move |reading| this.spread((reading - this.start) / v))).with_peak_map(
            PeakMap::Affine {
                offset: self.start,
                rate: v,
            },
        )
    }
}
