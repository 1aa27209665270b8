use nalgebra::{Matrix4, SVector};
use num_complex::Complex64;

/// Atomic sublevels in the fixed basis order used for every matrix and
/// vectorization in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    EPlus = 0,
    EMinus = 1,
    GPlus = 2,
    GMinus = 3,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::EPlus, Level::EMinus, Level::GPlus, Level::GMinus];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Row-major position of `rho[row][col]` in the 16-component density vector.
pub fn vec_index(row: Level, col: Level) -> usize {
    4 * row.index() + col.index()
}

/// A 4x4 density matrix over `(e+, e-, g+, g-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Matrix4<Complex64>);

impl DensityMatrix {
    pub fn zeros() -> Self {
        Self(Matrix4::zeros())
    }

    /// Pure state `|level><level|`.
    pub fn pure(level: Level) -> Self {
        let mut m = Matrix4::zeros();
        m[(level.index(), level.index())] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn get(&self, row: Level, col: Level) -> Complex64 {
        self.0[(row.index(), col.index())]
    }

    pub fn set(&mut self, row: Level, col: Level, v: Complex64) {
        self.0[(row.index(), col.index())] = v;
    }

    pub fn population(&self, level: Level) -> f64 {
        self.get(level, level).re
    }

    /// Populations in basis order.
    pub fn populations(&self) -> [f64; 4] {
        Level::ALL.map(|l| self.population(l))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest element of `rho - rho^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.0 + self.0.adjoint()).scale(0.5);
        let mut ev: [f64; 4] = h.symmetric_eigenvalues().into();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn to_vector(&self) -> SVector<Complex64, 16> {
        SVector::from_fn(|k, _| self.0[(k / 4, k % 4)])
    }

    pub fn from_vector(v: &SVector<Complex64, 16>) -> Self {
        Self(Matrix4::from_fn(|i, j| v[4 * i + j]))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectorization_is_row_major() {
        let mut rho = DensityMatrix::zeros();
        rho.set(Level::EPlus, Level::GMinus, Complex64::new(1.0, 2.0));
        let v = rho.to_vector();
        assert_eq!(v[vec_index(Level::EPlus, Level::GMinus)], Complex64::new(1.0, 2.0));
        assert_eq!(vec_index(Level::EPlus, Level::GMinus), 3);
        assert_eq!(vec_index(Level::GMinus, Level::EPlus), 12);
        assert_eq!(DensityMatrix::from_vector(&v), rho);
    }

    #[test]
    fn pure_state_invariants() {
        let rho = DensityMatrix::pure(Level::GMinus);
        assert_eq!(rho.trace(), Complex64::new(1.0, 0.0));
        assert_eq!(rho.hermiticity_error(), 0.0);
        let ev = rho.eigenvalues();
        assert!((ev[3] - 1.0).abs() < 1e-14 && ev[0].abs() < 1e-14);
    }
}
