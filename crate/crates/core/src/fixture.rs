//! Channel fixtures: the JSON carrier format plus the bundled channel
//! families the tests and CLI demos run on.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Serializable channel description. Complex entries are `[re, im]` pairs;
/// `kraus` is a list of row-major matrices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelFixture {
    pub name: String,
    pub dim: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl ChannelFixture {
    pub fn from_channel(
        name: impl Into<String>,
        channel: &KrausChannel,
        metadata: BTreeMap<String, serde_json::Value>,
    ) -> Self {
        let kraus = channel
            .kraus()
            .iter()
            .map(|a| {
                (0..a.rows())
                    .map(|i| {
                        (0..a.cols())
                            .map(|j| [a[(i, j)].re, a[(i, j)].im])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            name: name.into(),
            dim: channel.dim(),
            kraus,
            metadata,
        }
    }

    /// Validates shapes and assembles the channel, pointing at the offending
    /// operator/row on failure.
    pub fn to_channel(&self) -> Result<KrausChannel> {
        let mut kraus = Vec::with_capacity(self.kraus.len());
        for (op_idx, rows) in self.kraus.iter().enumerate() {
            if rows.len() != self.dim {
                return Err(Error::Parse(format!(
                    "fixture '{}': kraus operator {op_idx} has {} rows, expected {}",
                    self.name,
                    rows.len(),
                    self.dim
                )));
            }
            let mut m = ComplexMatrix::zeros(self.dim, self.dim);
            for (r, row) in rows.iter().enumerate() {
                if row.len() != self.dim {
                    return Err(Error::Parse(format!(
                        "fixture '{}': kraus operator {op_idx}, row {r} has {} entries, expected {}",
                        self.name,
                        row.len(),
                        self.dim
                    )));
                }
                for (c, &[re, im]) in row.iter().enumerate() {
                    m[(r, c)] = Complex64::new(re, im);
                }
            }
            kraus.push(m);
        }
        KrausChannel::new(self.dim, kraus)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_pretty() + "\n")?;
        Ok(())
    }
}

/// Built-in channel families.
pub mod families {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Pauli matrix by index: 0 -> I, 1 -> X, 2 -> Y, 3 -> Z.
    pub fn pauli(k: usize) -> ComplexMatrix {
        match k {
            0 => ComplexMatrix::identity(2),
            1 => ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            2 => ComplexMatrix::from_rows(&[
                vec![c(0.0, 0.0), c(0.0, -1.0)],
                vec![c(0.0, 1.0), c(0.0, 0.0)],
            ])
            .unwrap(),
            3 => ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap(),
            _ => panic!("pauli index must be 0..=3"),
        }
    }

    /// Bistochastic qutrit channel with two Kraus operators whose generated
    /// algebra splits into blocks of sizes 2 and 1; its peripheral spectrum
    /// is {1, -1} for every φ.
    pub fn example1(phi: f64) -> KrausChannel {
        let s = phi.sin();
        let co = phi.cos();
        let r2 = 2.0_f64.sqrt();
        let a1 = ComplexMatrix::from_rows(&[
            vec![c(0.3, 0.0), c(0.0, s / r2), c(-0.3, 0.0)],
            vec![c(0.0, -s / r2), c(0.0, 0.0), c(0.0, -s / r2)],
            vec![c(-0.3, 0.0), c(0.0, s / r2), c(0.3, 0.0)],
        ])
        .unwrap();
        let a2 = ComplexMatrix::from_real_rows(&[
            vec![0.4 - co / 2.0, 0.0, -co / 2.0 - 0.4],
            vec![0.0, co, 0.0],
            vec![-co / 2.0 - 0.4, 0.0, 0.4 - co / 2.0],
        ])
        .unwrap();
        KrausChannel::new(3, vec![a1, a2]).expect("structurally valid")
    }

    /// Bistochastic qutrit channel with three Hermitian Kraus operators
    /// sharing the eigenvector `(1/√2, -1/√2, 1)`; blocks are {2, 1} and the
    /// peripheral spectrum is {1} away from φ ∈ {0, π}.
    ///
    /// The third operator has pairwise distinct eigenvalues generically, so
    /// it can anchor the several-matrix common-eigenvector criterion.
    pub fn example2(phi: f64) -> KrausChannel {
        let s = phi.sin();
        let co = phi.cos();
        let r2 = 2.0_f64.sqrt();
        let a1 = ComplexMatrix::from_real_rows(&[
            vec![-s / 2.0, 0.0, s / (2.0 * r2)],
            vec![0.0, s / 2.0, s / (2.0 * r2)],
            vec![s / (2.0 * r2), s / (2.0 * r2), 0.0],
        ])
        .unwrap();
        let a2 = ComplexMatrix::from_real_rows(&[
            vec![
                1.0 / (4.0 * r2) - co / 4.0,
                -3.0 * co / 4.0 - 1.0 / (4.0 * r2),
                0.25 - co / (2.0 * r2),
            ],
            vec![
                -3.0 * co / 4.0 - 1.0 / (4.0 * r2),
                1.0 / (4.0 * r2) - co / 4.0,
                co / (2.0 * r2) - 0.25,
            ],
            vec![
                0.25 - co / (2.0 * r2),
                co / (2.0 * r2) - 0.25,
                co / 2.0 + 1.0 / (2.0 * r2),
            ],
        ])
        .unwrap();
        let a3 = ComplexMatrix::from_rows(&[
            vec![
                c(1.0 / (4.0 * r2), 0.0),
                c(-1.0 / (4.0 * r2), s / 2.0),
                c(0.25, s / (2.0 * r2)),
            ],
            vec![
                c(-1.0 / (4.0 * r2), -s / 2.0),
                c(1.0 / (4.0 * r2), 0.0),
                c(-0.25, s / (2.0 * r2)),
            ],
            vec![
                c(0.25, -s / (2.0 * r2)),
                c(-0.25, -s / (2.0 * r2)),
                c(1.0 / (2.0 * r2), 0.0),
            ],
        ])
        .unwrap();
        KrausChannel::new(3, vec![a1, a2, a3]).expect("structurally valid")
    }

    /// Trace-preserving, non-unital qutrit channel whose word basis is
    /// five-dimensional ({A1, A2, A1², A1A2, A2A1}) and ★-closed.
    pub fn nonunital_qutrit() -> KrausChannel {
        let r2 = 2.0_f64.sqrt();
        let f = 1.0 / 6.0_f64.sqrt();
        let a1 = ComplexMatrix::from_real_rows(&[
            vec![f, -f, f],
            vec![f / r2, f * r2, 0.0],
            vec![-f / r2, 0.0, f * r2],
        ])
        .unwrap();
        let a2 = ComplexMatrix::from_real_rows(&[
            vec![f * r2, f / r2, -f / r2],
            vec![-f, 1.5 * f, 0.5 * f],
            vec![f, 0.5 * f, 1.5 * f],
        ])
        .unwrap();
        KrausChannel::new(3, vec![a1, a2]).expect("structurally valid")
    }

    pub fn identity_channel(n: usize) -> KrausChannel {
        KrausChannel::new(n, vec![ComplexMatrix::identity(n)]).expect("structurally valid")
    }

    /// Qubit depolarizing channel with the four-Pauli Kraus form.
    pub fn depolarizing(p: f64) -> KrausChannel {
        assert!((0.0..=1.0).contains(&p));
        let mut kraus = vec![pauli(0).scale(c((1.0 - 0.75 * p).sqrt(), 0.0))];
        for k in 1..4 {
            kraus.push(pauli(k).scale(c((p / 4.0).sqrt(), 0.0)));
        }
        KrausChannel::new(2, kraus).expect("structurally valid")
    }

    /// Qubit amplitude damping; fixed point is the pure ground state for
    /// γ > 0.
    pub fn amplitude_damping(gamma: f64) -> KrausChannel {
        assert!((0.0..=1.0).contains(&gamma));
        let a1 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, (1.0 - gamma).sqrt()]])
            .unwrap();
        let a2 = ComplexMatrix::from_real_rows(&[vec![0.0, gamma.sqrt()], vec![0.0, 0.0]]).unwrap();
        KrausChannel::new(2, vec![a1, a2]).expect("structurally valid")
    }

    /// Qubit channel with three weighted Pauli Kraus operators {X, Y, Z};
    /// the length-1 words span only a 3-dimensional space but length-2 words
    /// reach all of M₂.
    pub fn three_pauli_qubit(weights: &[f64; 3]) -> KrausChannel {
        let total: f64 = weights.iter().sum();
        let kraus: Vec<ComplexMatrix> = weights
            .iter()
            .zip(1..4)
            .map(|(&w, k)| pauli(k).scale(c((w / total).sqrt(), 0.0)))
            .collect();
        KrausChannel::new(2, kraus).expect("structurally valid")
    }

    /// Mixed-unitary qutrit channel built from the cyclic shift `S` and the
    /// clock-twisted shift `SZ`: irreducible, invertible Kraus span, and a
    /// genuinely cyclic peripheral spectrum {1, ω, ω̄} of order 3.
    pub fn weyl_shift_qutrit(p: f64) -> KrausChannel {
        assert!((0.0..=1.0).contains(&p));
        let mut s = ComplexMatrix::zeros(3, 3);
        for j in 0..3 {
            s[((j + 1) % 3, j)] = Complex64::ONE;
        }
        let omega = c(-0.5, 3.0_f64.sqrt() / 2.0);
        let z = ComplexMatrix::diagonal(&[Complex64::ONE, omega, omega * omega]);
        let a1 = s.scale(c(p.sqrt(), 0.0));
        let a2 = s.matmul(&z).unwrap().scale(c((1.0 - p).sqrt(), 0.0));
        KrausChannel::new(3, vec![a1, a2]).expect("structurally valid")
    }
}
