//! Discrete right-hand side of the nonlocal system on a prefix of a uniform
//! cell-centred grid `x_i = (i + 1/2) dx`.
//!
//! Cell `i` carries a coverage fraction in `[0, 1]`: one for cells inside the
//! domain, the covered share for the cell containing the right end. Fixed and
//! moving domains share this code, so a moving domain with zero flux
//! reproduces the fixed-domain evolution exactly.

use crate::conv::ToeplitzConv;
use crate::model::ModelParams;

#[derive(Debug, Clone)]
pub struct Field {
    params: ModelParams,
    dx: f64,
    conv1: Option<ToeplitzConv>,
    conv2: Option<ToeplitzConv>,
    j1: Vec<f64>,
    j2: Vec<f64>,
}

impl Field {
    pub fn new(params: &ModelParams, dx: f64, capacity: usize) -> Field {
        let mut f = Field {
            params: params.clone(),
            dx,
            conv1: None,
            conv2: None,
            j1: Vec::new(),
            j2: Vec::new(),
        };
        if params.d1 > 0.0 {
            f.conv1 = Some(ToeplitzConv::for_kernel(
                &params.kernel1,
                params.d1,
                capacity,
                dx,
            ));
        }
        if params.d2 > 0.0 {
            f.conv2 = Some(ToeplitzConv::for_kernel(
                &params.kernel2,
                params.d2,
                capacity,
                dx,
            ));
        }
        f.extend_boundary_weights(capacity);
        f
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn capacity(&self) -> usize {
        self.j1.len()
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    /// Boundary weights `j1, j2` at the nodes.
    pub fn boundary_weights(&self) -> (&[f64], &[f64]) {
        (&self.j1, &self.j2)
    }

    fn extend_boundary_weights(&mut self, capacity: usize) {
        for i in self.j1.len()..capacity {
            let x = self.node(i);
            self.j1.push(self.params.kernel1.boundary_weight(x));
            self.j2.push(self.params.kernel2.boundary_weight(x));
        }
    }

    /// Grow the grid to at least `capacity` nodes.
    pub fn reserve(&mut self, capacity: usize) {
        if capacity <= self.capacity() {
            return;
        }
        let p = &self.params;
        if let Some(c) = &mut self.conv1 {
            c.extend_kernel(&p.kernel1, p.d1, capacity, self.dx);
        }
        if let Some(c) = &mut self.conv2 {
            c.extend_kernel(&p.kernel2, p.d2, capacity, self.dx);
        }
        self.extend_boundary_weights(capacity);
    }

    /// `out = d K (coverage * w)` for one component (0 or 1).
    pub fn integral(&self, which: usize, w: &[f64], coverage: &[f64], out: &mut [f64]) {
        let conv = if which == 0 { &self.conv1 } else { &self.conv2 };
        match conv {
            Some(c) => {
                let weighted: Vec<f64> = w.iter().zip(coverage).map(|(a, b)| a * b).collect();
                c.apply(&weighted, out);
            }
            None => out.fill(0.0),
        }
    }

    /// Time derivative of `(u, v)` on the first `u.len()` nodes.
    pub fn rhs(&self, u: &[f64], v: &[f64], coverage: &[f64], du: &mut [f64], dv: &mut [f64]) {
        let p = &self.params;
        self.integral(0, u, coverage, du);
        self.integral(1, v, coverage, dv);
        for i in 0..u.len() {
            du[i] += -(p.d1 * self.j1[i] + p.a) * u[i] + p.nonlinearity.h(v[i]);
            dv[i] += -(p.d2 * self.j2[i] + p.b) * v[i] + p.nonlinearity.g(u[i]);
        }
    }

    /// One Heun step of size `dt` on a fixed set of nodes.
    pub fn heun(&self, u: &mut [f64], v: &mut [f64], coverage: &[f64], dt: f64) {
        let m = u.len();
        let mut k1u = vec![0.0; m];
        let mut k1v = vec![0.0; m];
        self.rhs(u, v, coverage, &mut k1u, &mut k1v);
        let pu: Vec<f64> = (0..m).map(|i| u[i] + dt * k1u[i]).collect();
        let pv: Vec<f64> = (0..m).map(|i| v[i] + dt * k1v[i]).collect();
        let mut k2u = vec![0.0; m];
        let mut k2v = vec![0.0; m];
        self.rhs(&pu, &pv, coverage, &mut k2u, &mut k2v);
        for i in 0..m {
            u[i] += 0.5 * dt * (k1u[i] + k2u[i]);
            v[i] += 0.5 * dt * (k1v[i] + k2v[i]);
        }
    }
}

/// Zero out round-off negatives; returns the most negative entry seen.
pub fn clamp_roundoff(w: &mut [f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in w.iter_mut() {
        if *x < 0.0 {
            worst = worst.min(*x);
            *x = 0.0;
        }
    }
    worst
}

pub fn sup_norm(w: &[f64]) -> f64 {
    w.iter().fold(0.0, |m, x| m.max(x.abs()))
}
