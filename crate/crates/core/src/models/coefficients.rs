//! Triangular coefficient tables for relative spectra.
//!
//! For the linear and logistic families, `k! · h(u|k)` is a polynomial of
//! degree `k` in a family-specific variable (the offset log-length for the
//! linear model, the base sigmoid for the logistic model). Row `k` of a
//! table holds its coefficients, generated from row `k-1` by the
//! differential recursion specialised to the family.

/// Coefficients `c_{km}`, `0 ≤ m ≤ k ≤ kmax`, with `c_{00} = -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    rows: Vec<Vec<f64>>,
    rule: Rule,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Rule {
    Linear { gamma: f64 },
    Logistic { beta: f64, gamma: f64 },
}

impl CoefficientTable {
    /// Table for the linear family with slope `gamma`.
    pub fn linear(gamma: f64, kmax: usize) -> Self {
        let mut t = Self { rows: vec![vec![-1.0]], rule: Rule::Linear { gamma } };
        t.extend_to(kmax);
        t
    }

    /// Table for the logistic family with asymptote `beta`, slope `gamma`.
    pub fn logistic(beta: f64, gamma: f64, kmax: usize) -> Self {
        let mut t = Self { rows: vec![vec![-1.0]], rule: Rule::Logistic { beta, gamma } };
        t.extend_to(kmax);
        t
    }

    /// Largest row index held.
    pub fn kmax(&self) -> usize {
        self.rows.len() - 1
    }

    /// `c_{km}`; zero outside the triangle.
    pub fn get(&self, k: usize, m: usize) -> f64 {
        self.rows.get(k).and_then(|r| r.get(m)).copied().unwrap_or(0.0)
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    /// Appends rows until `kmax` is covered.
    pub fn extend_to(&mut self, kmax: usize) {
        while self.rows.len() <= kmax {
            let k = self.rows.len();
            let prev = &self.rows[k - 1];
            let at = |m: isize| if m < 0 { 0.0 } else { prev.get(m as usize).copied().unwrap_or(0.0) };
            let row: Vec<f64> = (0..=k as isize)
                .map(|m| match self.rule {
                    // k!h(u|k) = (k - 2 + γx) · (k-1)!h(u|k-1) - d/dx
                    Rule::Linear { gamma } => gamma * at(m - 1) + (k as f64 - 2.0) * at(m) - (m + 1) as f64 * at(m + 1),
                    // the sigmoid s obeys ds/du = -γ s (1 - s)
                    Rule::Logistic { beta, gamma } => {
                        (-1.0 + beta - gamma * (m - 1) as f64) * at(m - 1)
                            + (k as f64 - 1.0 - beta + gamma * m as f64) * at(m)
                    }
                })
                .collect();
            self.rows.push(row);
        }
    }

    /// `h(u|k) = (1/k!) Σ_m c_{km} z^m` by Horner's rule.
    pub fn evaluate(&self, k: usize, z: f64, inv_factorial: f64) -> f64 {
        self.rows[k].iter().rev().fold(0.0, |acc, &c| acc * z + c) * inv_factorial
    }
}
