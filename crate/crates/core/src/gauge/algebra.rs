use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// su(N) in the standard Hermitian generator basis, normalized so that
/// Tr(T^a T^b) = delta^{ab} / 2, together with the structure constants
/// f^{abc} of [T^a, T^b] = i f^{abc} T^c.
///
/// The basis reduces to the Pauli matrices over 2 for N = 2 and the Gell-Mann
/// matrices over 2 for N = 3. Indices run over the adjoint range 0..N^2-1;
/// the classic 1-based labels (f_123 etc.) shift down by one.
#[derive(Debug, Clone)]
pub struct SuNAlgebra {
    n: usize,
    generators: Vec<DMatrix<Complex64>>,
    f: Vec<f64>,
}

impl SuNAlgebra {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "su(N) needs N >= 2, got {n}; N = 1 has no traceless generators"
            )));
        }
        let generators = generator_basis(n);
        let dim = generators.len();
        // f^{abc} = -2i Tr([T^a, T^b] T^c), from Tr(T^a T^b) = delta/2.
        let mut f = vec![0.0; dim * dim * dim];
        for a in 0..dim {
            for b in (a + 1)..dim {
                let comm = &generators[a] * &generators[b] - &generators[b] * &generators[a];
                for c in 0..dim {
                    let tr = (&comm * &generators[c]).trace();
                    let val = 2.0 * tr.im; // -2i * (i Im) picks the imaginary part
                    if val.abs() < 1e-14 {
                        continue;
                    }
                    f[idx(dim, a, b, c)] = val;
                    f[idx(dim, b, a, c)] = -val;
                }
            }
        }
        Ok(SuNAlgebra { n, generators, f })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// Adjoint dimension N^2 - 1: the range of the field index a.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[DMatrix<Complex64>] {
        &self.generators
    }

    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        self.f[idx(self.dim(), a, b, c)]
    }

    /// Largest violation of f^{abc} = -f^{bac} = -f^{acb} over all indices.
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let v = self.f(a, b, c);
                    worst = worst.max((v + self.f(b, a, c)).abs());
                    worst = worst.max((v + self.f(a, c, b)).abs());
                }
            }
        }
        worst
    }

    /// Largest violation of
    /// f^{ade} f^{bcd} + f^{bde} f^{cad} + f^{cde} f^{abd} = 0.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let mut sum = 0.0;
                        for dd in 0..d {
                            sum += self.f(a, dd, e) * self.f(b, c, dd)
                                + self.f(b, dd, e) * self.f(c, a, dd)
                                + self.f(c, dd, e) * self.f(a, b, dd);
                        }
                        worst = worst.max(sum.abs());
                    }
                }
            }
        }
        worst
    }
}

fn idx(dim: usize, a: usize, b: usize, c: usize) -> usize {
    (a * dim + b) * dim + c
}

/// The generalized Gell-Mann ladder: for each new matrix dimension k we add
/// the symmetric and antisymmetric off-diagonal pair for every row j < k,
/// then the diagonal generator that separates the first k-1 slots from slot
/// k. Emitting them in that order reproduces the textbook Pauli/Gell-Mann
/// numbering.
fn generator_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut out = Vec::with_capacity(n * n - 1);
    let zero = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..n {
        for j in 0..k {
            let mut sym = zero.clone();
            sym[(j, k)] = Complex64::new(0.5, 0.0);
            sym[(k, j)] = Complex64::new(0.5, 0.0);
            out.push(sym);
            let mut anti = zero.clone();
            anti[(j, k)] = Complex64::new(0.0, -0.5);
            anti[(k, j)] = Complex64::new(0.0, 0.5);
            out.push(anti);
        }
        let scale = 1.0 / (2.0 * k as f64 * (k as f64 + 1.0)).sqrt();
        let mut diag = zero.clone();
        for i in 0..k {
            diag[(i, i)] = Complex64::new(scale, 0.0);
        }
        diag[(k, k)] = Complex64::new(-(k as f64) * scale, 0.0);
        out.push(diag);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_is_rejected() {
        assert!(SuNAlgebra::new(1).is_err());
        assert!(SuNAlgebra::new(0).is_err());
    }

    #[test]
    fn generators_are_traceless_hermitian_and_normalized() {
        for n in 2..=4 {
            let alg = SuNAlgebra::new(n).unwrap();
            assert_eq!(alg.dim(), n * n - 1);
            for (a, ta) in alg.generators().iter().enumerate() {
                assert!(ta.trace().norm() < 1e-15);
                assert!((ta - ta.adjoint()).norm() < 1e-15);
                for (b, tb) in alg.generators().iter().enumerate() {
                    let tr = (ta * tb).trace();
                    let expected = if a == b { 0.5 } else { 0.0 };
                    assert!(
                        (tr - Complex64::new(expected, 0.0)).norm() < 1e-14,
                        "N={n}: Tr(T{a} T{b}) = {tr}"
                    );
                }
            }
        }
    }

    #[test]
    fn su2_structure_constants_are_the_levi_civita_symbol() {
        let alg = SuNAlgebra::new(2).unwrap();
        let eps = |a: usize, b: usize, c: usize| -> f64 {
            match (a, b, c) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                (1, 0, 2) | (2, 1, 0) | (0, 2, 1) => -1.0,
                _ => 0.0,
            }
        };
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert!(
                        (alg.f(a, b, c) - eps(a, b, c)).abs() < 1e-15,
                        "f({a},{b},{c}) = {}",
                        alg.f(a, b, c)
                    );
                }
            }
        }
    }

    #[test]
    fn su3_reproduces_the_gell_mann_constants() {
        let alg = SuNAlgebra::new(3).unwrap();
        // Classic 1-based labels f_123 = 1, f_147 = 1/2, f_458 = sqrt(3)/2.
        assert!((alg.f(0, 1, 2) - 1.0).abs() < 1e-12);
        assert!((alg.f(0, 3, 6) - 0.5).abs() < 1e-12);
        assert!((alg.f(3, 4, 7) - 0.75f64.sqrt()).abs() < 1e-12);
        // A few more textbook values as spot checks: f_156 = -1/2, f_678 = sqrt(3)/2.
        assert!((alg.f(0, 4, 5) + 0.5).abs() < 1e-12);
        assert!((alg.f(5, 6, 7) - 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn antisymmetry_and_jacobi_hold_through_rank_four() {
        for n in 2..=4 {
            let alg = SuNAlgebra::new(n).unwrap();
            assert!(alg.antisymmetry_residual() < 1e-12, "N={n}");
            assert!(alg.jacobi_residual() < 1e-12, "N={n}");
        }
    }
}
