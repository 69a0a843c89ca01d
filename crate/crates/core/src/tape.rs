//! Scalar reverse-mode differentiation.
//!
//! Every operation appends one node holding its value, up to two parent
//! indices and the local partial derivative toward each parent, so parents
//! always precede children and a single backward sweep suffices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent in core on recent toolchains
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::{digamma_unchecked, ln_gamma, trigamma};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    parents: [u32; 2],
    partials: [f64; 2],
}

#[derive(Debug, Clone, Default)]
pub struct Tape {
    values: Vec<f64>,
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Tape {
            values: Vec::with_capacity(n),
            nodes: Vec::with_capacity(n),
        }
    }

    pub fn clear(&mut self) {
        self.values.clear();
        self.nodes.clear();
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn push(&mut self, value: f64, node: Node) -> Var {
        let i = self.values.len();
        assert!(i < NONE as usize, "tape overflow");
        self.values.push(value);
        self.nodes.push(node);
        Var(i as u32)
    }

    /// An input (or constant): a node without parents.
    pub fn leaf(&mut self, value: f64) -> Var {
        self.push(
            value,
            Node {
                parents: [NONE; 2],
                partials: [0.0; 2],
            },
        )
    }

    pub fn leaves(&mut self, values: &[f64]) -> Vec<Var> {
        values.iter().map(|&v| self.leaf(v)).collect()
    }

    pub fn value(&self, v: Var) -> f64 {
        self.values[v.index()]
    }

    pub fn values(&self, vs: &[Var]) -> Vec<f64> {
        vs.iter().map(|&v| self.value(v)).collect()
    }

    /// Custom unary node with a caller-supplied value and local derivative.
    pub fn unary(&mut self, x: Var, value: f64, partial: f64) -> Var {
        self.push(
            value,
            Node {
                parents: [x.0, NONE],
                partials: [partial, 0.0],
            },
        )
    }

    /// Custom binary node.
    pub fn binary(&mut self, x: Var, y: Var, value: f64, dx: f64, dy: f64) -> Var {
        self.push(
            value,
            Node {
                parents: [x.0, y.0],
                partials: [dx, dy],
            },
        )
    }

    pub fn add(&mut self, x: Var, y: Var) -> Var {
        let v = self.value(x) + self.value(y);
        self.binary(x, y, v, 1.0, 1.0)
    }

    pub fn sub(&mut self, x: Var, y: Var) -> Var {
        let v = self.value(x) - self.value(y);
        self.binary(x, y, v, 1.0, -1.0)
    }

    pub fn mul(&mut self, x: Var, y: Var) -> Var {
        let (a, b) = (self.value(x), self.value(y));
        self.binary(x, y, a * b, b, a)
    }

    pub fn div(&mut self, x: Var, y: Var) -> Var {
        let (a, b) = (self.value(x), self.value(y));
        let q = a / b;
        self.binary(x, y, q, 1.0 / b, -q / b)
    }

    pub fn neg(&mut self, x: Var) -> Var {
        let v = -self.value(x);
        self.unary(x, v, -1.0)
    }

    pub fn add_const(&mut self, x: Var, c: f64) -> Var {
        let v = self.value(x) + c;
        self.unary(x, v, 1.0)
    }

    pub fn mul_const(&mut self, x: Var, c: f64) -> Var {
        let v = self.value(x) * c;
        self.unary(x, v, c)
    }

    pub fn square(&mut self, x: Var) -> Var {
        let a = self.value(x);
        self.unary(x, a * a, 2.0 * a)
    }

    pub fn exp(&mut self, x: Var) -> Var {
        let v = self.value(x).exp();
        self.unary(x, v, v)
    }

    pub fn ln(&mut self, x: Var) -> Var {
        let a = self.value(x);
        self.unary(x, a.ln(), 1.0 / a)
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        let t = self.value(x).tanh();
        self.unary(x, t, 1.0 - t * t)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        let s = sigmoid(self.value(x));
        self.unary(x, s, s * (1.0 - s))
    }

    /// `ln σ(x)`, stable for large negative `x`.
    pub fn log_sigmoid(&mut self, x: Var) -> Var {
        let a = self.value(x);
        self.unary(x, -softplus(-a), sigmoid(-a))
    }

    pub fn softplus(&mut self, x: Var) -> Var {
        let a = self.value(x);
        self.unary(x, softplus(a), sigmoid(a))
    }

    pub fn lgamma(&mut self, x: Var) -> Var {
        let a = self.value(x);
        self.unary(x, ln_gamma(a), digamma_unchecked(a))
    }

    pub fn digamma(&mut self, x: Var) -> Var {
        let a = self.value(x);
        self.unary(x, digamma_unchecked(a), trigamma(a))
    }

    /// `clamp(x, lo, hi)`; the derivative is zero where clamping is active.
    pub fn clamp(&mut self, x: Var, lo: f64, hi: f64) -> Var {
        let a = self.value(x);
        if a < lo {
            self.unary(x, lo, 0.0)
        } else if a > hi {
            self.unary(x, hi, 0.0)
        } else {
            self.unary(x, a, 1.0)
        }
    }

    pub fn sum(&mut self, xs: &[Var]) -> Var {
        match xs.split_first() {
            None => self.leaf(0.0),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &x| self.add(acc, x)),
        }
    }

    /// `Σ w_i x_i + b`.
    pub fn affine(&mut self, weights: &[Var], xs: &[Var], bias: Var) -> Var {
        debug_assert_eq!(weights.len(), xs.len());
        let mut acc = bias;
        for (&w, &x) in weights.iter().zip(xs) {
            let p = self.mul(w, x);
            acc = self.add(acc, p);
        }
        acc
    }

    /// `ln Σ exp(x_i)`, shifted by the (constant) maximum for stability.
    pub fn logsumexp(&mut self, xs: &[Var]) -> Var {
        let m = xs
            .iter()
            .map(|&x| self.value(x))
            .fold(f64::NEG_INFINITY, f64::max);
        let shifted: Vec<Var> = xs
            .iter()
            .map(|&x| {
                let s = self.add_const(x, -m);
                self.exp(s)
            })
            .collect();
        let total = self.sum(&shifted);
        let l = self.ln(total);
        self.add_const(l, m)
    }

    pub fn log_softmax(&mut self, xs: &[Var]) -> Vec<Var> {
        let lse = self.logsumexp(xs);
        xs.iter().map(|&x| self.sub(x, lse)).collect()
    }

    pub fn softmax(&mut self, xs: &[Var]) -> Vec<Var> {
        let ls = self.log_softmax(xs);
        ls.into_iter().map(|l| self.exp(l)).collect()
    }

    /// Adjoints `∂root/∂node` for every node on the tape.
    pub fn grad(&self, root: Var) -> Result<Vec<f64>> {
        if root.index() >= self.len() {
            return Err(Error::Usage(format!(
                "root {} is not on a tape of {} nodes",
                root.index(),
                self.len()
            )));
        }
        let mut adj = vec![0.0; root.index() + 1];
        adj[root.index()] = 1.0;
        for i in (0..=root.index()).rev() {
            let a = adj[i];
            if a == 0.0 {
                continue;
            }
            let node = &self.nodes[i];
            for k in 0..2 {
                let p = node.parents[k];
                if p != NONE {
                    adj[p as usize] += a * node.partials[k];
                }
            }
        }
        adj.resize(self.len(), 0.0);
        Ok(adj)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let mut t = Tape::new();
        let a = t.leaf(2.0);
        let b = t.leaf(3.0);
        let f = t.mul(a, b);
        let g = t.grad(f).unwrap();
        assert_eq!((g[a.index()], g[b.index()]), (3.0, 2.0));
    }

    #[test]
    fn sigmoid_slope_at_zero() {
        let mut t = Tape::new();
        let x = t.leaf(0.0);
        let s = t.sigmoid(x);
        assert_eq!(t.grad(s).unwrap()[x.index()], 0.25);
    }

    #[test]
    fn root_off_tape_is_usage_error() {
        let mut other = Tape::new();
        other.leaf(1.0);
        let far = other.leaf(2.0);
        let t = Tape::new();
        assert!(matches!(t.grad(far), Err(Error::Usage(_))));
    }

    #[test]
    fn shared_subexpression_accumulates() {
        // f = x*x + x  => f' = 2x + 1
        let mut t = Tape::new();
        let x = t.leaf(1.5);
        let sq = t.mul(x, x);
        let f = t.add(sq, x);
        assert_eq!(t.grad(f).unwrap()[x.index()], 4.0);
    }

    #[test]
    fn softmax_jacobian_matches_differences() {
        let point = [0.3, -1.2, 0.8];
        let h = 1e-5;
        for out in 0..3 {
            let mut t = Tape::new();
            let xs = t.leaves(&point);
            let sm = t.softmax(&xs);
            let g = t.grad(sm[out]).unwrap();
            for i in 0..3 {
                let eval = |d: f64| {
                    let mut p = point;
                    p[i] += d;
                    let m = p.iter().cloned().fold(f64::MIN, f64::max);
                    let z: f64 = p.iter().map(|v| (v - m).exp()).sum();
                    (p[out] - m).exp() / z
                };
                let fd = (eval(h) - eval(-h)) / (2.0 * h);
                let rel = (g[xs[i].index()] - fd).abs() / fd.abs().max(1e-8);
                assert!(rel < 1e-4, "out={out} i={i} tape={} fd={fd}", g[xs[i].index()]);
            }
        }
    }

    #[test]
    fn special_nodes_match_differences() {
        let h = 1e-5;
        for &x0 in &[0.7, 2.0, 5.5] {
            let mut t = Tape::new();
            let x = t.leaf(x0);
            let lg = t.lgamma(x);
            let dg = t.digamma(x);
            let f = t.add(lg, dg);
            let g = t.grad(f).unwrap()[x.index()];
            let eval = |v: f64| ln_gamma(v) + digamma_unchecked(v);
            let fd = (eval(x0 + h) - eval(x0 - h)) / (2.0 * h);
            assert!((g - fd).abs() / fd.abs() < 1e-6);
        }
    }
}
