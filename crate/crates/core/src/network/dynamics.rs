//! Helicity amplitudes on edges and the two evolution laws that act on them.
//!
//! Every edge e carries a doublet (psi_plus(e), psi_minus(e)). The master
//! flow relaxes the doublet toward its helicity mean,
//!
//!   d psi_pm / dt = -lambda (psi_pm - psi_mp) + T_pm(e),
//!
//! while the continued flow rotates instead of relaxing,
//!
//!   d psi / dt = -i lambda (I - sigma_1) psi + T(e),
//!
//! so the flip generator picks up a factor of i and the free evolution
//! becomes exp(-i lambda (I - sigma_1) t), a unitary on each edge. Both are
//! integrated with the shared fourth-order stepper; the transport term T is
//! rebuilt at every intermediate stage so state-dependent models stay
//! consistent within a step.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::rk4_step;

use super::graph::SpinNetwork;

/// Helicity doublets for every edge, stored as two parallel arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAmplitudes {
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
}

impl EdgeAmplitudes {
    pub fn new(plus: Vec<Complex64>, minus: Vec<Complex64>) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(Error::Dimension(format!(
                "helicity components of length {} and {}",
                plus.len(),
                minus.len()
            )));
        }
        if plus
            .iter()
            .chain(minus.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Numeric("edge amplitudes must be finite".to_string()));
        }
        Ok(EdgeAmplitudes { plus, minus })
    }

    pub fn uniform(n: usize, plus: Complex64, minus: Complex64) -> Self {
        EdgeAmplitudes {
            plus: vec![plus; n],
            minus: vec![minus; n],
        }
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    pub fn plus(&self) -> &[Complex64] {
        &self.plus
    }

    pub fn minus(&self) -> &[Complex64] {
        &self.minus
    }

    /// Per-edge helicity sum psi_plus + psi_minus; the master flow conserves
    /// it exactly when transport vanishes.
    pub fn helicity_sum(&self, edge: usize) -> Complex64 {
        self.plus[edge] + self.minus[edge]
    }

    pub fn norm_sq(&self) -> f64 {
        self.plus
            .iter()
            .chain(self.minus.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    fn to_interleaved(&self) -> Vec<Complex64> {
        let mut state = Vec::with_capacity(2 * self.plus.len());
        state.extend_from_slice(&self.plus);
        state.extend_from_slice(&self.minus);
        state
    }

    fn from_interleaved(state: &[Complex64]) -> Self {
        let n = state.len() / 2;
        EdgeAmplitudes {
            plus: state[..n].to_vec(),
            minus: state[n..].to_vec(),
        }
    }
}

/// Source term models for the transport part of the flow.
#[derive(Debug, Clone)]
pub enum TransportModel {
    /// No transport; the flip dynamics acts alone.
    Zero,
    /// Fixed external source, one doublet per edge.
    Static {
        plus: Vec<Complex64>,
        minus: Vec<Complex64>,
    },
    /// Directed mean-gradient hopping toward downstream edges:
    /// T_pm(e) = rate * mean_{e' downstream} (psi_pm(e') - psi_pm(e)).
    Adjacency { hop_rate: f64 },
}

/// Transport evaluated on a state. Edges with no downstream neighbor get a
/// zero term and are listed so callers can see where the flow dead-ends.
#[derive(Debug, Clone)]
pub struct TransportReport {
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
    pub isolated: Vec<usize>,
}

/// Directed mean-gradient transport on the network adjacency.
pub fn transport_term(
    net: &SpinNetwork,
    amps: &EdgeAmplitudes,
    hop_rate: f64,
) -> Result<TransportReport> {
    if amps.len() != net.n_edges() {
        return Err(Error::Dimension(format!(
            "{} edge amplitudes on a {}-edge network",
            amps.len(),
            net.n_edges()
        )));
    }
    if !hop_rate.is_finite() {
        return Err(Error::Numeric("hop rate must be finite".to_string()));
    }
    Ok(adjacency_transport(net, &amps.plus, &amps.minus, hop_rate))
}

fn adjacency_transport(
    net: &SpinNetwork,
    plus: &[Complex64],
    minus: &[Complex64],
    hop_rate: f64,
) -> TransportReport {
    let n = net.n_edges();
    let mut report = TransportReport {
        plus: vec![Complex64::ZERO; n],
        minus: vec![Complex64::ZERO; n],
        isolated: Vec::new(),
    };
    for e in 0..n {
        let down = net.downstream(e);
        if down.is_empty() {
            report.isolated.push(e);
            continue;
        }
        let weight = hop_rate / down.len() as f64;
        let mut acc_plus = Complex64::ZERO;
        let mut acc_minus = Complex64::ZERO;
        for &d in down {
            acc_plus += plus[d] - plus[e];
            acc_minus += minus[d] - minus[e];
        }
        report.plus[e] = acc_plus * weight;
        report.minus[e] = acc_minus * weight;
    }
    report
}

/// Matter fields living on vertices, coupled to the edges they bound. A
/// scalar value phi(v) multiplies the edge amplitude itself; a spinor doublet
/// contributes the bilinear conj(chi_plus) chi_minus as an additive source.
#[derive(Debug, Clone, Default)]
pub struct MatterLayer {
    coupling: f64,
    scalar: BTreeMap<String, f64>,
    spinor: BTreeMap<String, [Complex64; 2]>,
}

impl MatterLayer {
    pub fn new(coupling: f64) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::Numeric("matter coupling must be finite".to_string()));
        }
        Ok(MatterLayer {
            coupling,
            scalar: BTreeMap::new(),
            spinor: BTreeMap::new(),
        })
    }

    pub fn with_scalar(mut self, vertex: impl Into<String>, phi: f64) -> Self {
        self.scalar.insert(vertex.into(), phi);
        self
    }

    pub fn with_spinor(mut self, vertex: impl Into<String>, chi: [Complex64; 2]) -> Self {
        self.spinor.insert(vertex.into(), chi);
        self
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    fn validate(&self, net: &SpinNetwork) -> Result<()> {
        let mut problems = Vec::new();
        for v in self.scalar.keys().chain(self.spinor.keys()) {
            if !net.has_vertex(v) {
                problems.push(format!("matter layer references unknown vertex '{v}'"));
            }
        }
        for (v, phi) in &self.scalar {
            if !phi.is_finite() {
                problems.push(format!("scalar value at '{v}' is not finite"));
            }
        }
        for (v, chi) in &self.spinor {
            if chi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                problems.push(format!("spinor value at '{v}' is not finite"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    fn phi(&self, vertex: &str) -> f64 {
        self.scalar.get(vertex).copied().unwrap_or(0.0)
    }

    fn spinor_bilinear(&self, vertex: &str) -> Complex64 {
        match self.spinor.get(vertex) {
            Some(chi) => chi[0].conj() * chi[1],
            None => Complex64::ZERO,
        }
    }
}

/// Vertex-coupled source: for each edge, the scalar fields at both endpoints
/// multiply the edge amplitude, and the spinor bilinears add in directly,
/// all scaled by the coupling.
pub fn matter_source(
    net: &SpinNetwork,
    amps: &EdgeAmplitudes,
    matter: &MatterLayer,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if amps.len() != net.n_edges() {
        return Err(Error::Dimension(format!(
            "{} edge amplitudes on a {}-edge network",
            amps.len(),
            net.n_edges()
        )));
    }
    matter.validate(net)?;
    Ok(matter_terms(net, &amps.plus, &amps.minus, matter))
}

fn matter_terms(
    net: &SpinNetwork,
    plus: &[Complex64],
    minus: &[Complex64],
    matter: &MatterLayer,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = net.n_edges();
    let mut out_plus = vec![Complex64::ZERO; n];
    let mut out_minus = vec![Complex64::ZERO; n];
    for (e, edge) in net.edges().iter().enumerate() {
        let phi_sum = matter.phi(edge.from_vertex()) + matter.phi(edge.to_vertex());
        let bilinear =
            matter.spinor_bilinear(edge.from_vertex()) + matter.spinor_bilinear(edge.to_vertex());
        out_plus[e] = (plus[e] * phi_sum + bilinear) * matter.coupling;
        out_minus[e] = (minus[e] * phi_sum + bilinear) * matter.coupling;
    }
    (out_plus, out_minus)
}

/// Evolution law for edge doublets: flip rate plus optional transport and
/// matter sources. `master_step` uses the relaxing generator, `continued_step`
/// the unitary one; everything else is shared.
#[derive(Debug, Clone)]
pub struct NetworkDynamics {
    lambda: f64,
    transport: TransportModel,
    matter: Option<MatterLayer>,
}

impl NetworkDynamics {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "flip rate must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(NetworkDynamics {
            lambda,
            transport: TransportModel::Zero,
            matter: None,
        })
    }

    pub fn with_transport(mut self, transport: TransportModel) -> Self {
        self.transport = transport;
        self
    }

    pub fn with_matter(mut self, matter: MatterLayer) -> Self {
        self.matter = Some(matter);
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn check(&self, net: &SpinNetwork, amps: &EdgeAmplitudes, dt: f64) -> Result<()> {
        if amps.len() != net.n_edges() {
            return Err(Error::Dimension(format!(
                "{} edge amplitudes on a {}-edge network",
                amps.len(),
                net.n_edges()
            )));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        match &self.transport {
            TransportModel::Static { plus, minus } => {
                if plus.len() != net.n_edges() || minus.len() != net.n_edges() {
                    return Err(Error::Dimension(format!(
                        "static transport of length {}/{} on a {}-edge network",
                        plus.len(),
                        minus.len(),
                        net.n_edges()
                    )));
                }
                if plus
                    .iter()
                    .chain(minus.iter())
                    .any(|z| !z.re.is_finite() || !z.im.is_finite())
                {
                    return Err(Error::Numeric(
                        "static transport must be finite".to_string(),
                    ));
                }
            }
            TransportModel::Adjacency { hop_rate } => {
                if !hop_rate.is_finite() {
                    return Err(Error::Numeric("hop rate must be finite".to_string()));
                }
            }
            TransportModel::Zero => {}
        }
        if let Some(matter) = &self.matter {
            matter.validate(net)?;
        }
        Ok(())
    }

    fn rhs(&self, net: &SpinNetwork, state: &[Complex64], flip: Complex64) -> Vec<Complex64> {
        let n = state.len() / 2;
        let (plus, minus) = state.split_at(n);
        let mut out = vec![Complex64::ZERO; 2 * n];
        for e in 0..n {
            let delta = (plus[e] - minus[e]) * flip;
            out[e] = -delta;
            out[n + e] = delta;
        }
        match &self.transport {
            TransportModel::Zero => {}
            TransportModel::Static {
                plus: src_plus,
                minus: src_minus,
            } => {
                for e in 0..n {
                    out[e] += src_plus[e];
                    out[n + e] += src_minus[e];
                }
            }
            TransportModel::Adjacency { hop_rate } => {
                let report = adjacency_transport(net, plus, minus, *hop_rate);
                for e in 0..n {
                    out[e] += report.plus[e];
                    out[n + e] += report.minus[e];
                }
            }
        }
        if let Some(matter) = &self.matter {
            let (m_plus, m_minus) = matter_terms(net, plus, minus, matter);
            for e in 0..n {
                out[e] += m_plus[e];
                out[n + e] += m_minus[e];
            }
        }
        out
    }

    fn advance(
        &self,
        net: &SpinNetwork,
        amps: &EdgeAmplitudes,
        dt: f64,
        flip: Complex64,
    ) -> Result<EdgeAmplitudes> {
        self.check(net, amps, dt)?;
        let state = amps.to_interleaved();
        let next = rk4_step(0.0, &state, dt, |_, y| self.rhs(net, y, flip))?;
        Ok(EdgeAmplitudes::from_interleaved(&next))
    }

    /// One step of the relaxing flow d psi_pm/dt = -lambda (psi_pm - psi_mp) + T.
    pub fn master_step(
        &self,
        net: &SpinNetwork,
        amps: &EdgeAmplitudes,
        dt: f64,
    ) -> Result<EdgeAmplitudes> {
        self.advance(net, amps, dt, Complex64::new(self.lambda, 0.0))
    }

    /// One step of the unitary flow d psi/dt = -i lambda (I - sigma_1) psi + T.
    pub fn continued_step(
        &self,
        net: &SpinNetwork,
        amps: &EdgeAmplitudes,
        dt: f64,
    ) -> Result<EdgeAmplitudes> {
        self.advance(net, amps, dt, Complex64::new(0.0, self.lambda))
    }
}

/// Transport-free master flow in closed form: the helicity mean is constant
/// and the difference decays as exp(-2 lambda t).
pub fn master_flip_closed_form(
    psi: (Complex64, Complex64),
    lambda: f64,
    t: f64,
) -> (Complex64, Complex64) {
    let mean = (psi.0 + psi.1) * 0.5;
    let half = (psi.0 - psi.1) * 0.5 * (-2.0 * lambda * t).exp();
    (mean + half, mean - half)
}

/// Transport-free continued flow in closed form:
/// exp(-i lambda (I - sigma_1) t) = e^{-i lambda t} (cos(lambda t) I + i sin(lambda t) sigma_1).
pub fn continued_flip_closed_form(
    psi: (Complex64, Complex64),
    lambda: f64,
    t: f64,
) -> (Complex64, Complex64) {
    let phase = Complex64::new(0.0, -lambda * t).exp();
    let c = Complex64::new((lambda * t).cos(), 0.0);
    let s = Complex64::new(0.0, (lambda * t).sin());
    (
        phase * (c * psi.0 + s * psi.1),
        phase * (s * psi.0 + c * psi.1),
    )
}
