//! Sentence encoders behind a pluggable contract.
//!
//! Desk-scale training uses [`TinyEncoder`], a trainable token embedding
//! with one bidirectional recurrent layer. [`FrozenVectorEncoder`] loads
//! pretrained word vectors (word2vec text format) as a fixed encoder, which
//! exercises the same contract a large pretrained model would use.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Graph, ParamId, ParamSet, Var};
use crate::error::ModelError;

/// Sentence encoder: per-token vectors of a fixed dimension plus a sequence
/// context vector of the same dimension. The output length always equals
/// the input token count.
pub trait EncoderContract {
    fn identifier(&self) -> &str;
    fn dim(&self) -> usize;
    fn trainable(&self) -> bool;
    fn encode(&self, graph: &mut Graph<'_>, tokens: &[&str]) -> (Vec<Var>, Var);
}

/// Vocabulary shared by trainable encoders; id 0 is the unknown token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocab {
    tokens: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

pub const UNK: &str = "<unk>";

impl Vocab {
    pub fn build<'a>(sentences: impl IntoIterator<Item = &'a [&'a str]>) -> Self {
        let mut tokens = vec![UNK.to_string()];
        let mut index = HashMap::from([(UNK.to_string(), 0)]);
        for sent in sentences {
            for tok in sent {
                if !index.contains_key(*tok) {
                    index.insert(tok.to_string(), tokens.len());
                    tokens.push(tok.to_string());
                }
            }
        }
        Vocab { tokens, index }
    }

    /// Rebuild the lookup index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Token embedding plus one bidirectional recurrent layer with residual
/// connection: t_i = x_i + h_i + g_i where h runs left-to-right and g
/// right-to-left. The context vector is the elementwise max over t.
pub struct TinyEncoder {
    vocab: Vocab,
    dim: usize,
    embedding: ParamId,
    w_fwd: ParamId,
    u_fwd: ParamId,
    b_fwd: ParamId,
    w_bwd: ParamId,
    u_bwd: ParamId,
    b_bwd: ParamId,
}

impl TinyEncoder {
    pub fn new(vocab: Vocab, dim: usize, params: &mut ParamSet, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TinyEncoder {
            embedding: params.add("enc.embedding", vocab.len(), dim, &mut rng),
            w_fwd: params.add("enc.w_fwd", dim, dim, &mut rng),
            u_fwd: params.add("enc.u_fwd", dim, dim, &mut rng),
            b_fwd: params.add_zeros("enc.b_fwd", dim, 1),
            w_bwd: params.add("enc.w_bwd", dim, dim, &mut rng),
            u_bwd: params.add("enc.u_bwd", dim, dim, &mut rng),
            b_bwd: params.add_zeros("enc.b_bwd", dim, 1),
            vocab,
            dim,
        }
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }
}

impl EncoderContract for TinyEncoder {
    fn identifier(&self) -> &str {
        "tiny-birnn"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn trainable(&self) -> bool {
        true
    }

    fn encode(&self, g: &mut Graph<'_>, tokens: &[&str]) -> (Vec<Var>, Var) {
        let n = tokens.len();
        assert!(n > 0, "cannot encode an empty sentence");
        let xs: Vec<Var> = tokens
            .iter()
            .map(|t| g.param_row(self.embedding, self.vocab.id(t)))
            .collect();

        let mut fwd: Vec<Var> = Vec::with_capacity(n);
        for i in 0..n {
            let mut pre = g.affine(self.w_fwd, self.b_fwd, xs[i]);
            if i > 0 {
                let rec = g.matvec(self.u_fwd, fwd[i - 1]);
                pre = g.add(pre, rec);
            }
            fwd.push(g.tanh(pre));
        }
        let mut bwd: Vec<Var> = vec![xs[0]; n];
        for i in (0..n).rev() {
            let mut pre = g.affine(self.w_bwd, self.b_bwd, xs[i]);
            if i + 1 < n {
                let rec = g.matvec(self.u_bwd, bwd[i + 1]);
                pre = g.add(pre, rec);
            }
            bwd[i] = g.tanh(pre);
        }

        let token_vecs: Vec<Var> = (0..n)
            .map(|i| {
                let a = g.add(xs[i], fwd[i]);
                g.add(a, bwd[i])
            })
            .collect();
        let context = g.max_pool(&token_vecs);
        (token_vecs, context)
    }
}

/// Fixed pretrained word vectors (word2vec text format: one `word v1 .. vd`
/// line per entry). Unknown tokens map to the zero vector.
pub struct FrozenVectorEncoder {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl FrozenVectorEncoder {
    pub fn from_text(content: &str) -> Result<Self, ModelError> {
        let mut vectors = HashMap::new();
        let mut dim = 0usize;
        for (i, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts
                .next()
                .ok_or_else(|| ModelError::Encoder(format!("vector line {} empty", i + 1)))?;
            // A leading "count dim" header line is allowed.
            let vals: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
            let vals =
                vals.map_err(|e| ModelError::Encoder(format!("vector line {}: {e}", i + 1)))?;
            if i == 0 && vals.len() == 1 && word.parse::<usize>().is_ok() {
                continue;
            }
            if dim == 0 {
                dim = vals.len();
            } else if vals.len() != dim {
                return Err(ModelError::Encoder(format!(
                    "vector line {}: dimension {} != {}",
                    i + 1,
                    vals.len(),
                    dim
                )));
            }
            vectors.insert(word.to_string(), vals);
        }
        if dim == 0 {
            return Err(ModelError::Encoder("no vectors found".into()));
        }
        Ok(FrozenVectorEncoder { dim, vectors })
    }
}

impl EncoderContract for FrozenVectorEncoder {
    fn identifier(&self) -> &str {
        "frozen-vectors"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn trainable(&self) -> bool {
        false
    }

    fn encode(&self, g: &mut Graph<'_>, tokens: &[&str]) -> (Vec<Var>, Var) {
        let token_vecs: Vec<Var> = tokens
            .iter()
            .map(|t| {
                let v = self
                    .vectors
                    .get(*t)
                    .cloned()
                    .unwrap_or_else(|| vec![0.0; self.dim]);
                g.leaf(v)
            })
            .collect();
        let context = g.max_pool(&token_vecs);
        (token_vecs, context)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocab_assigns_stable_ids() {
        let s1 = ["the", "parser", "works"];
        let s2 = ["the", "tagger", "works"];
        let vocab = Vocab::build([&s1[..], &s2[..]]);
        assert_eq!(vocab.len(), 5); // unk + 4 distinct
        assert_eq!(vocab.id("the"), 1);
        assert_eq!(vocab.id("never-seen"), 0);
    }

    #[test]
    fn tiny_encoder_output_matches_token_count() {
        let s = ["a", "b", "c", "d"];
        let vocab = Vocab::build([&s[..]]);
        let mut params = ParamSet::new();
        let enc = TinyEncoder::new(vocab, 8, &mut params, 3);
        let mut g = Graph::new(&params);
        let (toks, ctx) = enc.encode(&mut g, &s);
        assert_eq!(toks.len(), 4);
        assert_eq!(g.value(ctx).len(), 8);
        assert_eq!(g.value(toks[0]).len(), 8);
    }

    #[test]
    fn frozen_vectors_parse_and_encode() {
        let content = "2 3\nparser 0.1 0.2 0.3\ntagger -0.5 0 1\n";
        let enc = FrozenVectorEncoder::from_text(content).unwrap();
        assert_eq!(enc.dim(), 3);
        assert!(!enc.trainable());
        let params = ParamSet::new();
        let mut g = Graph::new(&params);
        let (toks, _) = enc.encode(&mut g, &["parser", "unknown"]);
        assert_eq!(g.value(toks[0]), &[0.1, 0.2, 0.3]);
        assert_eq!(g.value(toks[1]), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn mismatched_vector_dims_error() {
        assert!(FrozenVectorEncoder::from_text("a 1 2\nb 1 2 3\n").is_err());
    }
}
