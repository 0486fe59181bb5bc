use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::log_log_slope;

use super::algebra::SuNAlgebra;

/// Real adjoint-indexed field pair: one electric and one magnetic 3-vector
/// per algebra index a in 0..N^2-1, plus the coupling g. Natural units
/// throughout; g is dimensionless, which is what lets the bilinear term be
/// added to the linear ones (see [`LieField::unit_audit`]).
#[derive(Debug, Clone)]
pub struct LieField {
    algebra: SuNAlgebra,
    e: Vec<[f64; 3]>,
    b: Vec<[f64; 3]>,
    g: f64,
}

impl LieField {
    pub fn new(algebra: SuNAlgebra, e: Vec<[f64; 3]>, b: Vec<[f64; 3]>, g: f64) -> Result<Self> {
        let dim = algebra.dim();
        if e.len() != dim || b.len() != dim {
            return Err(Error::Dimension(format!(
                "{} electric and {} magnetic vectors for an adjoint dimension of {dim}",
                e.len(),
                b.len()
            )));
        }
        if !g.is_finite()
            || e.iter()
                .chain(b.iter())
                .any(|v| v.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::Numeric(
                "field entries and coupling must be finite".into(),
            ));
        }
        Ok(LieField { algebra, e, b, g })
    }

    pub fn zero(algebra: SuNAlgebra, g: f64) -> Result<Self> {
        let dim = algebra.dim();
        LieField::new(algebra, vec![[0.0; 3]; dim], vec![[0.0; 3]; dim], g)
    }

    pub fn algebra(&self) -> &SuNAlgebra {
        &self.algebra
    }

    pub fn e(&self) -> &[[f64; 3]] {
        &self.e
    }

    pub fn b(&self) -> &[[f64; 3]] {
        &self.b
    }

    pub fn coupling(&self) -> f64 {
        self.g
    }

    /// Dimensional-tracking warnings. E +- iB adds quantities of the same
    /// unit, but the bilinear g f (E x B) term carries field-squared units;
    /// the sum only types in natural units with dimensionless g.
    pub fn unit_audit(&self) -> Vec<String> {
        let live = |vs: &[[f64; 3]]| vs.iter().any(|v| v.iter().any(|x| *x != 0.0));
        let mut warnings = Vec::new();
        if self.g != 0.0 && live(&self.e) && live(&self.b) {
            warnings.push(
                "bilinear term g f^{abc} (E^b x B^c) has field-squared units; \
                 it is added to field-unit terms, which is consistent only in \
                 natural units with dimensionless g"
                    .to_string(),
            );
        }
        warnings
    }
}

/// The complex field pair F+-^a = E^a +- iB^a + g f^{abc} (E^b x B^c).
#[derive(Debug, Clone)]
pub struct RsVector {
    pub f_plus: Vec<[Complex64; 3]>,
    pub f_minus: Vec<[Complex64; 3]>,
}

pub fn rs_vector(field: &LieField) -> RsVector {
    let dim = field.algebra.dim();
    let mut f_plus = Vec::with_capacity(dim);
    let mut f_minus = Vec::with_capacity(dim);
    for a in 0..dim {
        // The bilinear term is real and branch-independent.
        let mut bilinear = [0.0; 3];
        for b in 0..dim {
            for c in 0..dim {
                let f = field.algebra.f(a, b, c);
                if f == 0.0 {
                    continue;
                }
                let cross = cross_real(&field.e[b], &field.b[c]);
                for i in 0..3 {
                    bilinear[i] += field.g * f * cross[i];
                }
            }
        }
        let mut plus = [Complex64::ZERO; 3];
        let mut minus = [Complex64::ZERO; 3];
        for i in 0..3 {
            plus[i] = Complex64::new(field.e[a][i] + bilinear[i], field.b[a][i]);
            minus[i] = Complex64::new(field.e[a][i] + bilinear[i], -field.b[a][i]);
        }
        f_plus.push(plus);
        f_minus.push(minus);
    }
    RsVector { f_plus, f_minus }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl RsVector {
    pub fn branch(&self, branch: Branch) -> &[[Complex64; 3]] {
        match branch {
            Branch::Plus => &self.f_plus,
            Branch::Minus => &self.f_minus,
        }
    }

    pub fn dim(&self) -> usize {
        self.f_plus.len()
    }
}

/// L = 1/2 sum_a Re(F^a* . F^a), summed over the adjoint index directly.
pub fn lagrangian_index_form(rs: &RsVector, branch: Branch) -> f64 {
    rs.branch(branch)
        .iter()
        .map(|f| f.iter().map(|c| c.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        * 0.5
}

/// L = 1/2 Re Tr(F* . F) with F = F^a T^a a matrix-valued 3-vector and F*
/// its Hermitian conjugate. With Tr(T^a T^b) = delta/2 this evaluates to
/// exactly half the index form; computing it through actual matrix products
/// keeps the route independent.
pub fn lagrangian_trace_form(algebra: &SuNAlgebra, rs: &RsVector, branch: Branch) -> Result<f64> {
    if rs.dim() != algebra.dim() {
        return Err(Error::Dimension(format!(
            "field with {} indices against an algebra of dimension {}",
            rs.dim(),
            algebra.dim()
        )));
    }
    let n = algebra.rank();
    let mut total = 0.0;
    for i in 0..3 {
        let mut component = DMatrix::<Complex64>::zeros(n, n);
        for (a, t) in algebra.generators().iter().enumerate() {
            component += t.map(|v| v * rs.branch(branch)[a][i]);
        }
        total += (component.adjoint() * &component).trace().re;
    }
    Ok(0.5 * total)
}

/// Index-form Lagrangian with the trace form cross-checked on both branches.
/// The two routes must sit in the exact 2:1 normalization ratio; a deviation
/// means the generator basis or the assembly is broken, and is reported as
/// an assertion error rather than a value.
pub fn lagrangian_density(algebra: &SuNAlgebra, rs: &RsVector) -> Result<f64> {
    let plus = lagrangian_index_form(rs, Branch::Plus);
    let minus = lagrangian_index_form(rs, Branch::Minus);
    for (branch, index_form) in [(Branch::Plus, plus), (Branch::Minus, minus)] {
        let trace_form = lagrangian_trace_form(algebra, rs, branch)?;
        if (trace_form - 0.5 * index_form).abs() > 1e-12 * (1.0 + index_form.abs()) {
            return Err(Error::Assertion(format!(
                "trace-form Lagrangian {trace_form} is not half the index form {index_form}"
            )));
        }
    }
    if (plus - minus).abs() > 1e-12 * (1.0 + plus.abs()) {
        return Err(Error::Assertion(format!(
            "branch Lagrangians differ on a real field: {plus} vs {minus}"
        )));
    }
    Ok(plus)
}

/// Max-norm residuals of the printed variational equations, one entry per
/// adjoint index:
///
///   dL/dE^a =    Re[(F^a)*] + g f^{abc} Re[(F^b)* x B^c],
///   dL/dB^a = +-Im[(F^a)*] + g f^{abc} Re[(F^b)* x E^c].
///
/// The equations are algebraic (the Lagrangian carries no derivatives), so
/// the residuals are pointwise vector norms, not PDE defects.
#[derive(Debug, Clone, Serialize)]
pub struct BranchResiduals {
    pub branch: Branch,
    pub e_residuals: Vec<f64>,
    pub b_residuals: Vec<f64>,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub plus: BranchResiduals,
    pub minus: BranchResiduals,
}

pub fn field_equation_residuals(field: &LieField) -> ResidualReport {
    let rs = rs_vector(field);
    ResidualReport {
        plus: branch_residuals(field, &rs, Branch::Plus),
        minus: branch_residuals(field, &rs, Branch::Minus),
    }
}

fn branch_residuals(field: &LieField, rs: &RsVector, branch: Branch) -> BranchResiduals {
    let dim = field.algebra.dim();
    let fs = rs.branch(branch);
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let mut e_residuals = Vec::with_capacity(dim);
    let mut b_residuals = Vec::with_capacity(dim);
    let mut max = 0.0f64;
    for a in 0..dim {
        let conj_a = [fs[a][0].conj(), fs[a][1].conj(), fs[a][2].conj()];
        let mut res_e = [conj_a[0].re, conj_a[1].re, conj_a[2].re];
        let mut res_b = [
            sign * conj_a[0].im,
            sign * conj_a[1].im,
            sign * conj_a[2].im,
        ];
        for b in 0..dim {
            let conj_b = [fs[b][0].conj(), fs[b][1].conj(), fs[b][2].conj()];
            for c in 0..dim {
                let fabc = field.algebra.f(a, b, c);
                if fabc == 0.0 {
                    continue;
                }
                let cross_b = cross_complex(&conj_b, &field.b[c]);
                let cross_e = cross_complex(&conj_b, &field.e[c]);
                for i in 0..3 {
                    res_e[i] += field.g * fabc * cross_b[i].re;
                    res_b[i] += field.g * fabc * cross_e[i].re;
                }
            }
        }
        let ne = res_e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let nb = res_b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        max = max.max(ne).max(nb);
        e_residuals.push(ne);
        b_residuals.push(nb);
    }
    BranchResiduals {
        branch,
        e_residuals,
        b_residuals,
        max,
    }
}

fn cross_real(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn cross_complex(a: &[Complex64; 3], b: &[f64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// The magnetic field the variational equations ask for at weak coupling:
/// B^a = g f^{abc} (E^b x E^c).
pub fn weak_field_magnetic(algebra: &SuNAlgebra, e: &[[f64; 3]], g: f64) -> Result<Vec<[f64; 3]>> {
    let dim = algebra.dim();
    if e.len() != dim {
        return Err(Error::Dimension(format!(
            "{} electric vectors for an adjoint dimension of {dim}",
            e.len()
        )));
    }
    let mut b = vec![[0.0; 3]; dim];
    for a in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let f = algebra.f(a, i, j);
                if f == 0.0 {
                    continue;
                }
                let cross = cross_real(&e[i], &e[j]);
                for comp in 0..3 {
                    b[a][comp] += g * f * cross[comp];
                }
            }
        }
    }
    Ok(b)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakFieldScaling {
    pub couplings: Vec<f64>,
    pub b_residuals: Vec<f64>,
    pub fitted_slope: f64,
}

/// Build B^a = g f^{abc}(E^b x E^c) from a fixed electric field at each
/// coupling in the ladder and measure the surviving dL/dB residual. The two
/// O(g) contributions cancel identically, so the residual is cubic in g:
/// the leading survivor is g^2 f f (E x B) x E with B itself O(g).
pub fn weak_field_scaling(
    algebra: &SuNAlgebra,
    e: &[[f64; 3]],
    couplings: &[f64],
) -> Result<WeakFieldScaling> {
    if couplings.len() < 2 {
        return Err(Error::Domain(format!(
            "scaling fit needs at least two couplings, got {}",
            couplings.len()
        )));
    }
    if couplings.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::Domain(format!(
            "couplings must be positive and finite, got {couplings:?}"
        )));
    }
    let mut b_residuals = Vec::with_capacity(couplings.len());
    for &g in couplings {
        let b = weak_field_magnetic(algebra, e, g)?;
        let field = LieField::new(algebra.clone(), e.to_vec(), b, g)?;
        let report = field_equation_residuals(&field);
        let worst = report
            .plus
            .b_residuals
            .iter()
            .fold(0.0f64, |m, v| m.max(*v));
        b_residuals.push(worst);
    }
    let fitted_slope = log_log_slope(couplings, &b_residuals)?;
    Ok(WeakFieldScaling {
        couplings: couplings.to_vec(),
        b_residuals,
        fitted_slope,
    })
}
