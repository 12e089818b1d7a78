//! Minimal reverse-mode autodiff over f64 vectors.
//!
//! Parameters live in one flat [`ParamSet`]; each forward pass builds a
//! fresh [`Graph`] whose nodes reference parameters by id. Loss heads are
//! fused ops (cross-entropy, binary cross-entropy and the soft-label
//! divergences) with analytic backward rules, which keeps the graph small
//! and the gradients exact.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sciie_core::softlabel::{sigmoid, softmax, Divergence, SoftLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

/// Flat parameter storage with named, shaped slices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    pub specs: Vec<ParamSpec>,
    pub values: Vec<f64>,
}

impl ParamSet {
    pub fn new() -> Self {
        ParamSet::default()
    }

    /// Register a rows x cols parameter initialized uniformly in
    /// [-bound, bound] with bound = sqrt(6 / (rows + cols)).
    pub fn add(&mut self, name: &str, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ParamId {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        self.add_with(name, rows, cols, |rng| rng.random_range(-bound..bound), rng)
    }

    /// Register a zero-initialized parameter (biases).
    pub fn add_zeros(&mut self, name: &str, rows: usize, cols: usize) -> ParamId {
        let offset = self.values.len();
        self.specs.push(ParamSpec {
            name: name.to_string(),
            rows,
            cols,
            offset,
        });
        self.values.extend(std::iter::repeat_n(0.0, rows * cols));
        ParamId(self.specs.len() - 1)
    }

    fn add_with(
        &mut self,
        name: &str,
        rows: usize,
        cols: usize,
        mut init: impl FnMut(&mut ChaCha8Rng) -> f64,
        rng: &mut ChaCha8Rng,
    ) -> ParamId {
        let offset = self.values.len();
        self.specs.push(ParamSpec {
            name: name.to_string(),
            rows,
            cols,
            offset,
        });
        self.values.extend((0..rows * cols).map(|_| init(rng)));
        ParamId(self.specs.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spec(&self, id: ParamId) -> &ParamSpec {
        &self.specs[id.0]
    }

    pub fn slice(&self, id: ParamId) -> &[f64] {
        let s = self.spec(id);
        &self.values[s.offset..s.offset + s.rows * s.cols]
    }

    pub fn find(&self, name: &str) -> Option<&ParamSpec> {
        self.specs.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Op {
    /// Constant input; receives no gradient.
    Leaf,
    ParamVec(ParamId),
    ParamRow {
        id: ParamId,
        row: usize,
    },
    /// W x for a rows x cols parameter and a cols-dim input.
    MatVec {
        w: ParamId,
        x: usize,
    },
    Add(usize, usize),
    Scale(usize, f64),
    Tanh(usize),
    Concat(Vec<usize>),
    /// Elementwise max over same-dimension inputs; winners recorded at
    /// forward time.
    MaxPool {
        inputs: Vec<usize>,
        winners: Vec<usize>,
    },
    /// -log softmax(x)[target], scalar.
    CeLogits {
        x: usize,
        target: usize,
    },
    /// Mean over classes of binary cross-entropy with logits, scalar.
    BceLogits {
        x: usize,
        targets: Vec<f64>,
    },
    /// Soft-label divergence on raw scores, scalar.
    DivLogits {
        x: usize,
        p: SoftLabel,
        div: Divergence,
    },
    SumScalars(Vec<usize>),
}

struct Node {
    value: Vec<f64>,
    op: Op,
}

pub struct Graph<'p> {
    params: &'p ParamSet,
    nodes: Vec<Node>,
}

impl<'p> Graph<'p> {
    pub fn new(params: &'p ParamSet) -> Self {
        Graph {
            params,
            nodes: Vec::new(),
        }
    }

    fn push(&mut self, value: Vec<f64>, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &[f64] {
        &self.nodes[v.0].value
    }

    pub fn scalar(&self, v: Var) -> f64 {
        debug_assert_eq!(self.nodes[v.0].value.len(), 1);
        self.nodes[v.0].value[0]
    }

    pub fn leaf(&mut self, value: Vec<f64>) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn zeros(&mut self, dim: usize) -> Var {
        self.leaf(vec![0.0; dim])
    }

    pub fn param(&mut self, id: ParamId) -> Var {
        let value = self.params.slice(id).to_vec();
        self.push(value, Op::ParamVec(id))
    }

    pub fn param_row(&mut self, id: ParamId, row: usize) -> Var {
        let s = self.params.spec(id);
        debug_assert!(row < s.rows);
        let start = s.offset + row * s.cols;
        let value = self.params.values[start..start + s.cols].to_vec();
        self.push(value, Op::ParamRow { id, row })
    }

    pub fn matvec(&mut self, w: ParamId, x: Var) -> Var {
        let s = self.params.spec(w);
        let xv = &self.nodes[x.0].value;
        debug_assert_eq!(xv.len(), s.cols);
        let wv = &self.params.values[s.offset..s.offset + s.rows * s.cols];
        let mut out = vec![0.0; s.rows];
        for (i, out_i) in out.iter_mut().enumerate() {
            let row = &wv[i * s.cols..(i + 1) * s.cols];
            *out_i = row.iter().zip(xv).map(|(w, x)| w * x).sum();
        }
        self.push(out, Op::MatVec { w, x: x.0 })
    }

    /// W x + b.
    pub fn affine(&mut self, w: ParamId, b: ParamId, x: Var) -> Var {
        let wx = self.matvec(w, x);
        let bias = self.param(b);
        self.add(wx, bias)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let av = &self.nodes[a.0].value;
        let bv = &self.nodes[b.0].value;
        debug_assert_eq!(av.len(), bv.len());
        let out = av.iter().zip(bv).map(|(x, y)| x + y).collect();
        self.push(out, Op::Add(a.0, b.0))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let out = self.nodes[a.0].value.iter().map(|x| x * c).collect();
        self.push(out, Op::Scale(a.0, c))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let out = self.nodes[a.0].value.iter().map(|x| x.tanh()).collect();
        self.push(out, Op::Tanh(a.0))
    }

    pub fn concat(&mut self, parts: &[Var]) -> Var {
        let mut out = Vec::new();
        for p in parts {
            out.extend_from_slice(&self.nodes[p.0].value);
        }
        self.push(out, Op::Concat(parts.iter().map(|v| v.0).collect()))
    }

    pub fn max_pool(&mut self, inputs: &[Var]) -> Var {
        debug_assert!(!inputs.is_empty());
        let dim = self.nodes[inputs[0].0].value.len();
        let mut out = vec![f64::NEG_INFINITY; dim];
        let mut winners = vec![0usize; dim];
        for (k, v) in inputs.iter().enumerate() {
            let val = &self.nodes[v.0].value;
            debug_assert_eq!(val.len(), dim);
            for d in 0..dim {
                if val[d] > out[d] {
                    out[d] = val[d];
                    winners[d] = k;
                }
            }
        }
        self.push(
            out,
            Op::MaxPool {
                inputs: inputs.iter().map(|v| v.0).collect(),
                winners,
            },
        )
    }

    pub fn ce_with_logits(&mut self, x: Var, target: usize) -> Var {
        let logits = &self.nodes[x.0].value;
        debug_assert!(target < logits.len());
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
        let value = lse - logits[target];
        self.push(vec![value], Op::CeLogits { x: x.0, target })
    }

    pub fn bce_with_logits(&mut self, x: Var, targets: Vec<f64>) -> Var {
        let logits = &self.nodes[x.0].value;
        debug_assert_eq!(logits.len(), targets.len());
        let k = logits.len() as f64;
        // max(z, 0) - t z + ln(1 + exp(-|z|)) is the stable per-class form.
        let sum: f64 = logits
            .iter()
            .zip(&targets)
            .map(|(&z, &t)| z.max(0.0) - t * z + (-z.abs()).exp().ln_1p())
            .sum();
        self.push(vec![sum / k], Op::BceLogits { x: x.0, targets })
    }

    pub fn soft_divergence(&mut self, x: Var, p: SoftLabel, div: Divergence) -> Var {
        let logits = &self.nodes[x.0].value;
        let value = div
            .value_from_logits(&p, logits)
            .expect("soft label dimension matches auxiliary head");
        self.push(vec![value], Op::DivLogits { x: x.0, p, div })
    }

    pub fn sum_scalars(&mut self, xs: &[Var]) -> Var {
        let value = xs.iter().map(|v| self.scalar(*v)).sum();
        self.push(
            vec![value],
            Op::SumScalars(xs.iter().map(|v| v.0).collect()),
        )
    }

    pub fn mean_scalars(&mut self, xs: &[Var]) -> Var {
        debug_assert!(!xs.is_empty());
        let sum = self.sum_scalars(xs);
        self.scale(sum, 1.0 / xs.len() as f64)
    }

    /// Accumulate d(root)/d(params) into `param_grads` (same layout as
    /// [`ParamSet::values`]).
    pub fn backward(&self, root: Var, param_grads: &mut [f64]) {
        debug_assert_eq!(param_grads.len(), self.params.len());
        let mut grads: Vec<Vec<f64>> = self
            .nodes
            .iter()
            .map(|n| vec![0.0; n.value.len()])
            .collect();
        grads[root.0] = vec![1.0];

        for i in (0..=root.0).rev() {
            if grads[i].iter().all(|&g| g == 0.0) {
                continue;
            }
            let g = std::mem::take(&mut grads[i]);
            match &self.nodes[i].op {
                Op::Leaf => {}
                Op::ParamVec(id) => {
                    let s = self.params.spec(*id);
                    for (d, gd) in g.iter().enumerate() {
                        param_grads[s.offset + d] += gd;
                    }
                }
                Op::ParamRow { id, row } => {
                    let s = self.params.spec(*id);
                    let start = s.offset + row * s.cols;
                    for (d, gd) in g.iter().enumerate() {
                        param_grads[start + d] += gd;
                    }
                }
                Op::MatVec { w, x } => {
                    let s = self.params.spec(*w);
                    let xv = &self.nodes[*x].value;
                    let wv = &self.params.values[s.offset..s.offset + s.rows * s.cols];
                    for (r, gr) in g.iter().enumerate() {
                        if *gr == 0.0 {
                            continue;
                        }
                        let row_off = s.offset + r * s.cols;
                        for c in 0..s.cols {
                            param_grads[row_off + c] += gr * xv[c];
                            grads[*x][c] += gr * wv[r * s.cols + c];
                        }
                    }
                }
                Op::Add(a, b) => {
                    for (d, gd) in g.iter().enumerate() {
                        grads[*a][d] += gd;
                        grads[*b][d] += gd;
                    }
                }
                Op::Scale(a, c) => {
                    for (d, gd) in g.iter().enumerate() {
                        grads[*a][d] += gd * c;
                    }
                }
                Op::Tanh(a) => {
                    let y = &self.nodes[i].value;
                    for (d, gd) in g.iter().enumerate() {
                        grads[*a][d] += gd * (1.0 - y[d] * y[d]);
                    }
                }
                Op::Concat(parts) => {
                    let mut off = 0;
                    for p in parts {
                        let len = self.nodes[*p].value.len();
                        for d in 0..len {
                            grads[*p][d] += g[off + d];
                        }
                        off += len;
                    }
                }
                Op::MaxPool { inputs, winners } => {
                    for (d, gd) in g.iter().enumerate() {
                        grads[inputs[winners[d]]][d] += gd;
                    }
                }
                Op::CeLogits { x, target } => {
                    let q = softmax(&self.nodes[*x].value);
                    let scale = g[0];
                    for (d, qd) in q.iter().enumerate() {
                        let onehot = if d == *target { 1.0 } else { 0.0 };
                        grads[*x][d] += scale * (qd - onehot);
                    }
                }
                Op::BceLogits { x, targets } => {
                    let k = targets.len() as f64;
                    let scale = g[0];
                    for (d, &t) in targets.iter().enumerate() {
                        let q = sigmoid(self.nodes[*x].value[d]);
                        grads[*x][d] += scale * (q - t) / k;
                    }
                }
                Op::DivLogits { x, p, div } => {
                    let grad = div
                        .grad_from_logits(p, &self.nodes[*x].value)
                        .expect("dimensions checked at forward");
                    let scale = g[0];
                    for (d, gd) in grad.iter().enumerate() {
                        grads[*x][d] += scale * gd;
                    }
                }
                Op::SumScalars(xs) => {
                    for x in xs {
                        grads[*x][0] += g[0];
                    }
                }
            }
        }
    }
}

/// Adam optimizer over the flat parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(learning_rate: f64, n_params: usize) -> Self {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        debug_assert_eq!(params.len(), grads.len());
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / b1t;
            let v_hat = self.v[i] / b2t;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use sciie_core::softlabel::{make_soft_label, Agreement};

    fn grad_check(build: impl Fn(&ParamSet) -> f64, params: &mut ParamSet, analytic: &[f64]) {
        let h = 1e-6;
        for (i, &expected) in analytic.iter().enumerate() {
            let orig = params.values[i];
            params.values[i] = orig + h;
            let plus = build(params);
            params.values[i] = orig - h;
            let minus = build(params);
            params.values[i] = orig;
            let numeric = (plus - minus) / (2.0 * h);
            let denom = expected.abs().max(numeric.abs()).max(1e-8);
            assert!(
                (expected - numeric).abs() / denom < 1e-5,
                "param {i}: analytic {expected} vs numeric {numeric}"
            );
        }
    }

    #[test]
    fn composite_graph_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut params = ParamSet::new();
        let emb = params.add("emb", 4, 3, &mut rng);
        let w = params.add("w", 3, 3, &mut rng);
        let b = params.add_zeros("b", 3, 1);
        let w2 = params.add("w2", 2, 7, &mut rng);
        let soft = make_soft_label(0, Agreement::Low, 2).unwrap();

        let build = |p: &ParamSet| -> f64 {
            let mut g = Graph::new(p);
            let x0 = g.param_row(emb, 1);
            let x1 = g.param_row(emb, 3);
            let h0 = g.affine(w, b, x0);
            let h0 = g.tanh(h0);
            let h1 = g.affine(w, b, x1);
            let h1 = g.tanh(h1);
            let pooled = g.max_pool(&[h0, h1]);
            let one = g.leaf(vec![1.0]);
            let rep = g.concat(&[pooled, h0, one]);
            let logits = g.matvec(w2, rep);
            let ce = g.ce_with_logits(logits, 1);
            let bce = g.bce_with_logits(logits, vec![1.0, 0.0]);
            let div = g.soft_divergence(logits, soft.clone(), Divergence::KlStandard);
            let total = g.mean_scalars(&[ce, bce, div]);
            g.scalar(total)
        };

        let mut g = Graph::new(&params);
        let x0 = g.param_row(emb, 1);
        let x1 = g.param_row(emb, 3);
        let h0 = g.affine(w, b, x0);
        let h0 = g.tanh(h0);
        let h1 = g.affine(w, b, x1);
        let h1 = g.tanh(h1);
        let pooled = g.max_pool(&[h0, h1]);
        let one = g.leaf(vec![1.0]);
        let rep = g.concat(&[pooled, h0, one]);
        let logits = g.matvec(w2, rep);
        let ce = g.ce_with_logits(logits, 1);
        let bce = g.bce_with_logits(logits, vec![1.0, 0.0]);
        let div = g.soft_divergence(logits, soft.clone(), Divergence::KlStandard);
        let total = g.mean_scalars(&[ce, bce, div]);
        let mut grads = vec![0.0; params.len()];
        g.backward(total, &mut grads);
        drop(g);

        grad_check(build, &mut params, &grads);
    }

    #[test]
    fn ce_of_uniform_logits_is_log_classes() {
        let params = ParamSet::new();
        let mut g = Graph::new(&params);
        let x = g.leaf(vec![0.3; 7]);
        let ce = g.ce_with_logits(x, 2);
        assert!((g.scalar(ce) - 7.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn adam_minimizes_a_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut params = ParamSet::new();
        params.add("x", 4, 1, &mut rng);
        let mut adam = Adam::new(0.05, params.len());
        for _ in 0..400 {
            let grads: Vec<f64> = params.values.iter().map(|x| 2.0 * (x - 3.0)).collect();
            adam.step(&mut params.values, &grads);
        }
        for x in &params.values {
            assert!((x - 3.0).abs() < 1e-3, "{x}");
        }
    }
}
