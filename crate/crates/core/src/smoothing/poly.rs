//! Dense univariate polynomials and piecewise-polynomial profiles.

/// Polynomial with ascending coefficients `c[0] + c[1] x + ...`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// `a + b x`.
    pub fn linear(a: f64, b: f64) -> Self {
        Poly(vec![a, b])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Value and the first three derivatives at `x`.
    pub fn eval_jet(&self, x: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        let n = self.0.len();
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in (k..n).rev() {
                // falling factorial i (i-1) ... (i-k+1)
                let ff: f64 = (0..k).map(|j| (i - j) as f64).product();
                acc = acc * x + ff * self.0[i];
            }
            *slot = acc;
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.0.get(i).unwrap_or(&0.0) + other.0.get(i).unwrap_or(&0.0)).collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::default();
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// `p(alpha x + beta)`.
    pub fn compose_affine(&self, alpha: f64, beta: f64) -> Poly {
        let inner = Poly::linear(beta, alpha);
        self.0.iter().rev().fold(Poly::default(), |acc, c| acc.mul(&inner).add(&Poly::constant(*c)))
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![0.0];
        out.extend(self.0.iter().enumerate().map(|(i, c)| c / (i + 1) as f64));
        Poly(out)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }

    /// Definite integral over `[0, x]`.
    pub fn integral_to(&self, x: f64) -> f64 {
        self.antiderivative().eval(x)
    }
}

/// Septic smoothstep `35u⁴ − 84u⁵ + 70u⁶ − 20u⁷`: 0 at 0, 1 at 1, with three
/// vanishing derivatives at both ends.
pub fn septic_step() -> Poly {
    Poly(vec![0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0])
}

/// Normalized compact bump `(35/32)(1 − u²)³` on `[-1, 1]` (unit integral).
pub fn triweight_bump() -> Poly {
    Poly(vec![1.0, 0.0, -3.0, 0.0, 3.0, 0.0, -1.0]).scale(35.0 / 32.0)
}

/// Piecewise polynomial on consecutive knots; piece `i` is stored in the local
/// variable `t - knots[i]`.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    pub knots: Vec<f64>,
    pub pieces: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn piece_index(&self, t: f64) -> usize {
        match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            i => (i - 1).min(self.pieces.len() - 1),
        }
    }

    pub fn eval_jet(&self, t: f64) -> [f64; 4] {
        let i = self.piece_index(t);
        self.pieces[i].eval_jet(t - self.knots[i])
    }

    pub fn end(&self) -> f64 {
        *self.knots.last().unwrap()
    }
}
