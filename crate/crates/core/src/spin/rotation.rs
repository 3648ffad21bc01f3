use num_complex::Complex64;

pub type Matrix2 = [[Complex64; 2]; 2];
/// Amplitudes `(c0, c1)` on `|0>`, `|1>`.
pub type Spinor = [Complex64; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Resonant rotation by `angle` about the equatorial axis at azimuth `axis_phase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    matrix: Matrix2,
}

impl Rotation {
    pub fn new(angle: f64, axis_phase: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        let c = Complex64::new(c, 0.0);
        let e = Complex64::from_polar(1.0, axis_phase);
        Self { matrix: [[c, -I * e.conj() * s], [-I * e * s, c]] }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.matrix
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Rotation) -> Rotation {
        Rotation { matrix: mat_mul(&self.matrix, &first.matrix) }
    }

    pub fn apply(&self, psi: &Spinor) -> Spinor {
        let m = &self.matrix;
        [m[0][0] * psi[0] + m[0][1] * psi[1], m[1][0] * psi[0] + m[1][1] * psi[1]]
    }

    /// `R rho R^dagger`.
    pub fn conjugate(&self, rho: &Matrix2) -> Matrix2 {
        mat_mul(&mat_mul(&self.matrix, rho), &dagger(&self.matrix))
    }
}

pub(crate) fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn dagger(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Free precession by relative phase `phase` (`rho01 -> rho01 e^{i phase}`).
pub fn precess(psi: &Spinor, phase: f64) -> Spinor {
    let h = Complex64::from_polar(1.0, 0.5 * phase);
    [psi[0] * h, psi[1] * h.conj()]
}

/// Qubit basis state a site is prepared in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum InitialState {
    Zero,
    #[default]
    One,
}

impl InitialState {
    pub fn spinor(self) -> Spinor {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        match self {
            InitialState::Zero => [o, z],
            InitialState::One => [z, o],
        }
    }

    pub fn density(self) -> Matrix2 {
        let psi = self.spinor();
        [[psi[0] * psi[0].conj(), psi[0] * psi[1].conj()], [psi[1] * psi[0].conj(), psi[1] * psi[1].conj()]]
    }
}

/// Bloch vector with `z = P0 - P1`, `x + i y = 2 rho10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn from_state(s: InitialState) -> Self {
        Self::from_density(&s.density())
    }

    pub fn from_density(rho: &Matrix2) -> Self {
        let c = 2.0 * rho[1][0];
        BlochVector([c.re, c.im, (rho[0][0] - rho[1][1]).re])
    }

    pub fn to_density(&self) -> Matrix2 {
        let [x, y, z] = self.0;
        let c10 = Complex64::new(0.5 * x, 0.5 * y);
        [[Complex64::new(0.5 * (1.0 + z), 0.0), c10.conj()], [c10, Complex64::new(0.5 * (1.0 - z), 0.0)]]
    }

    pub fn rotate(&self, r: &Rotation) -> Self {
        Self::from_density(&r.conjugate(&self.to_density()))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn population0(&self) -> f64 {
        0.5 * (1.0 + self.0[2])
    }
}

/// One atom of a Monte-Carlo ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState {
    /// Total motional energy, joules.
    pub energy: f64,
    /// Accumulated free-precession phase, radians.
    pub phase: f64,
    pub amplitudes: Spinor,
}

impl AtomState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes[0].norm_sqr() + self.amplitudes[1].norm_sqr()
    }
}

/// State of one trap site under either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum SiteRegisterState {
    Bloch(BlochVector),
    Ensemble(Vec<AtomState>),
}

impl SiteRegisterState {
    pub fn population0(&self) -> f64 {
        match self {
            SiteRegisterState::Bloch(b) => b.population0(),
            SiteRegisterState::Ensemble(atoms) if atoms.is_empty() => 0.0,
            SiteRegisterState::Ensemble(atoms) => {
                atoms.iter().map(|a| a.amplitudes[0].norm_sqr()).sum::<f64>() / atoms.len() as f64
            }
        }
    }
}

/// Rotates a site's state; applied atom by atom for an ensemble.
pub fn apply_rotation(state: SiteRegisterState, angle: f64, axis_phase: f64) -> SiteRegisterState {
    let r = Rotation::new(angle, axis_phase);
    match state {
        SiteRegisterState::Bloch(b) => SiteRegisterState::Bloch(b.rotate(&r)),
        SiteRegisterState::Ensemble(mut atoms) => {
            for a in &mut atoms {
                a.amplitudes = r.apply(&a.amplitudes);
            }
            SiteRegisterState::Ensemble(atoms)
        }
    }
}
