//! Fully connected tanh network over a flat parameter vector.

use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Layer widths, input first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture(pub Vec<usize>);

impl Architecture {
    pub fn param_count(&self) -> usize {
        self.0.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn inputs(&self) -> usize {
        self.0[0]
    }

    pub fn outputs(&self) -> usize {
        *self.0.last().expect("non-empty architecture")
    }

    /// Forward pass; every layer, the output layer included, uses tanh.
    /// Weights are stored row-major per layer (`out x in`) followed by the biases.
    pub fn forward(&self, params: &[f64], input: &[f64]) -> Vec<f64> {
        debug_assert_eq!(params.len(), self.param_count());
        debug_assert_eq!(input.len(), self.inputs());
        let mut x = input.to_vec();
        let mut off = 0;
        for w in self.0.windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &params[off..off + n_in * n_out];
            let bias = &params[off + n_in * n_out..off + n_in * n_out + n_out];
            off += n_in * n_out + n_out;
            x = (0..n_out)
                .map(|o| {
                    let row = &weights[o * n_in..(o + 1) * n_in];
                    let z: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + bias[o];
                    z.tanh()
                })
                .collect();
        }
        x
    }

    /// Hidden layers drawn with scale `1/sqrt(fan_in)`; the output layer is
    /// zero so a fresh network contributes nothing.
    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.param_count());
        let layers = self.0.len() - 1;
        for (i, w) in self.0.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            if i + 1 == layers {
                p.extend(std::iter::repeat_n(0.0, n_in * n_out + n_out));
            } else {
                let normal = Normal::new(0.0, 1.0 / (n_in as f64).sqrt()).expect("valid std");
                p.extend((0..n_in * n_out).map(|_| normal.sample(rng)));
                p.extend(std::iter::repeat_n(0.0, n_out));
            }
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn count_and_zero_output() {
        let a = Architecture(vec![19, 32, 32, 2]);
        assert_eq!(a.param_count(), 19 * 32 + 32 + 32 * 32 + 32 + 32 * 2 + 2);
        let p = a.init(&mut rand_chacha::ChaCha8Rng::seed_from_u64(0));
        assert_eq!(a.forward(&p, &[0.3; 19]), vec![0.0, 0.0]);
    }

    #[test]
    fn hand_computed_single_layer() {
        let a = Architecture(vec![2, 1]);
        let out = a.forward(&[0.5, -1.0, 0.25], &[2.0, 1.0]);
        assert!((out[0] - (0.5f64 * 2.0 - 1.0 + 0.25).tanh()).abs() < 1e-15);
    }
}
