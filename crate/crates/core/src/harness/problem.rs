use super::analytic::GaussCoeffs;
use super::HarnessError;
use crate::mesh::Box2;
use crate::semidiscrete::{Equation, Field, Layout, Potential, Scalar, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    FreeSchrodinger,
    HarmonicOscillator,
    Advection,
}

impl std::str::FromStr for ProblemKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "schrodinger" | "free_schrodinger" | "free" => Ok(ProblemKind::FreeSchrodinger),
            "harmonic_oscillator" | "harmonic" | "ho" => Ok(ProblemKind::HarmonicOscillator),
            "advection" => Ok(ProblemKind::Advection),
            _ => Err(HarnessError::Config(format!("unknown problem {s:?}"))),
        }
    }
}

/// `amplitude * exp(-width |x - center|^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub width: f64,
    pub center: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// Packet `exp(-alpha (x - x0)^2 + i k (x - x0))` per dimension.
    pub alpha: [f64; 2],
    pub x0: [f64; 2],
    pub k: [f64; 2],
    /// Oscillator potential `m a_x^2 x^2 / 2 + m a_y^2 y^2 / 2`.
    pub mass: f64,
    pub omega: [f64; 2],
    pub hbar: f64,
    /// Advection speeds and initial bumps.
    pub a: [f64; 2],
    pub bumps: Vec<Bump>,
    pub domain: Box2,
    pub periodic: [bool; 2],
    pub t_final: f64,
}

impl ProblemSpec {
    fn packet(kind: ProblemKind, alpha: f64, domain: Box2, periodic: bool, t_final: f64) -> Self {
        ProblemSpec {
            kind,
            alpha: [alpha; 2],
            x0: [0.0; 2],
            k: [0.0; 2],
            mass: 1.0,
            omega: [0.0; 2],
            hbar: 1.0,
            a: [0.0; 2],
            bumps: Vec::new(),
            domain,
            periodic: [periodic; 2],
            t_final,
        }
    }

    /// Free packet at a mesh corner on the periodic `[-10, 10]^2`, `t = 0.05`.
    pub fn schrodinger_convergence() -> Self {
        Self::packet(
            ProblemKind::FreeSchrodinger,
            1.0,
            Box2::square(-10.0, 10.0),
            true,
            0.05,
        )
    }

    /// Bump travelling to the mesh corners on the periodic `[0, 4]^2`, `t = 4.6`.
    pub fn advection_convergence() -> Self {
        ProblemSpec {
            kind: ProblemKind::Advection,
            a: [-2.0, -6.0 / 23.0],
            bumps: vec![Bump {
                amplitude: 1.0,
                width: 50.0,
                center: [0.8, 0.8],
            }],
            ..Self::packet(
                ProblemKind::Advection,
                1.0,
                Box2::square(0.0, 4.0),
                true,
                4.6,
            )
        }
    }

    /// Packet released at `(1, 1)` in the oscillator with `a_x = a_y = 8`, 1000 steps of `4e-4`.
    pub fn harmonic_oscillator(mass: f64) -> Self {
        ProblemSpec {
            x0: [1.0, 1.0],
            mass,
            omega: [8.0, 8.0],
            ..Self::packet(
                ProblemKind::HarmonicOscillator,
                2.0,
                Box2::square(-6.0, 6.0),
                false,
                0.4,
            )
        }
    }

    /// Free packet with `k_y = 1` used to generate the adapted mesh, `t = 0.01`.
    pub fn adaptive_packet() -> Self {
        ProblemSpec {
            k: [0.0, 1.0],
            ..Self::packet(
                ProblemKind::FreeSchrodinger,
                2.0,
                Box2::square(-6.0, 6.0),
                false,
                0.01,
            )
        }
    }

    /// Three bumps of increasing sharpness on `[0, 1]^2`, inflow from the left and bottom.
    pub fn mesh_comparison() -> Self {
        let b = |width, cx, cy| Bump {
            amplitude: 1.0,
            width,
            center: [cx, cy],
        };
        ProblemSpec {
            kind: ProblemKind::Advection,
            a: [-2.0, -1.0],
            bumps: vec![
                b(200.0, 0.25, 0.75),
                b(600.0, 0.625, 0.325),
                b(1800.0, 0.875, 0.0625),
            ],
            ..Self::packet(
                ProblemKind::Advection,
                1.0,
                Box2::square(0.0, 1.0),
                false,
                0.12,
            )
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.kind != ProblemKind::Advection && !(self.alpha[0] > 0.0 && self.alpha[1] > 0.0) {
            return Err(HarnessError::Config(
                "packet widths alpha must be positive".into(),
            ));
        }
        if self.hbar <= 0.0 || !self.t_final.is_finite() || self.t_final < 0.0 {
            return Err(HarnessError::Config(
                "hbar must be positive and t_final non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn is_complex(&self) -> bool {
        self.kind != ProblemKind::Advection
    }

    /// Quadratic coefficient of the potential per dimension.
    pub fn potential_coeffs(&self) -> [f64; 2] {
        match self.kind {
            ProblemKind::HarmonicOscillator => [
                self.mass * self.omega[0].powi(2) / 2.0,
                self.mass * self.omega[1].powi(2) / 2.0,
            ],
            _ => [0.0; 2],
        }
    }

    pub fn equation(&self) -> Equation {
        match self.kind {
            ProblemKind::Advection => Equation::Advection { a: self.a },
            _ => {
                let c = self.potential_coeffs();
                Equation::Schrodinger {
                    potential: Potential::quadratic(c[0], c[1]),
                    hbar: self.hbar,
                }
            }
        }
    }

    /// Reference solution at time `t`.
    pub fn exact(&self, t: f64) -> Exact {
        match self.kind {
            ProblemKind::Advection => Exact::Advected {
                bumps: self.bumps.clone(),
                shift: [self.a[0] * t, self.a[1] * t],
                domain: self.domain,
                periodic: self.periodic,
            },
            _ => {
                let w = self.potential_coeffs();
                let g = |d: usize| {
                    GaussCoeffs::initial(self.alpha[d], self.x0[d], self.k[d], 0.0)
                        .evolve(w[d], self.hbar, t)
                };
                Exact::Gaussian { g: [g(0), g(1)] }
            }
        }
    }
}

/// Evaluable reference solution.
#[derive(Clone, Debug)]
pub enum Exact {
    Gaussian {
        g: [GaussCoeffs; 2],
    },
    /// `u0(x + a t)`, wrapped into the domain on periodic dimensions.
    Advected {
        bumps: Vec<Bump>,
        shift: [f64; 2],
        domain: Box2,
        periodic: [bool; 2],
    },
}

impl Exact {
    pub fn eval(&self, x: f64, y: f64) -> C64 {
        match self {
            Exact::Gaussian { g } => g[0].eval(x) * g[1].eval(y),
            Exact::Advected {
                bumps,
                shift,
                domain,
                periodic,
            } => {
                let p = [x + shift[0], y + shift[1]];
                let ext = domain.extent();
                let v: f64 = bumps
                    .iter()
                    .map(|b| {
                        let mut r2 = 0.0;
                        for d in 0..2 {
                            let mut dx = p[d] - b.center[d];
                            if periodic[d] {
                                dx = (dx + ext[d] / 2.0).rem_euclid(ext[d]) - ext[d] / 2.0;
                            }
                            r2 += dx * dx;
                        }
                        b.amplitude * (-b.width * r2).exp()
                    })
                    .sum();
                C64::new(v, 0.0)
            }
        }
    }
}

/// Reference solution sampled on every stored point.
pub fn analytic_solution<T: Scalar>(
    spec: &ProblemSpec,
    layout: &Layout,
    t: f64,
) -> Result<Field<T>, HarnessError> {
    if T::COMPLEX != spec.is_complex() {
        return Err(HarnessError::Config(
            "scalar type does not match the problem".into(),
        ));
    }
    let e = spec.exact(t);
    Ok(layout.sample_field(|x, y| T::from_c64(e.eval(x, y))))
}
