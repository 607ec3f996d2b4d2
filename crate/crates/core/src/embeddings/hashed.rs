use super::DocumentEmbedding;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Signed feature hashing of character n-grams.
///
/// Each token is wrapped in `<` and `>` boundary marks; every n-gram with n in
/// the configured range adds ±1 to one coordinate. FNV-1a over the seed and the
/// UTF-8 bytes keeps the mapping identical on every platform.
#[derive(Debug, Clone)]
pub struct HashedNgram {
    dim: usize,
    n_range: (usize, usize),
    seed: u64,
}

impl HashedNgram {
    pub fn new(dim: usize, n_range: (usize, usize), seed: u64) -> Self {
        Self { dim, n_range, seed }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn hash(&self, gram: &[char]) -> u64 {
        let mut h = FNV_OFFSET;
        let mut feed = |byte: u8| {
            h ^= u64::from(byte);
            h = h.wrapping_mul(FNV_PRIME);
        };
        self.seed.to_le_bytes().into_iter().for_each(&mut feed);
        let mut buf = [0u8; 4];
        for c in gram {
            c.encode_utf8(&mut buf).bytes().for_each(&mut feed);
        }
        h
    }

    pub fn add_token(&self, token: &str, acc: &mut [f64]) {
        let chars: Vec<char> = std::iter::once('<')
            .chain(token.chars())
            .chain(std::iter::once('>'))
            .collect();
        for n in self.n_range.0..=self.n_range.1 {
            for gram in chars.windows(n) {
                let h = self.hash(gram);
                let idx = (h % self.dim as u64) as usize;
                acc[idx] += if h >> 63 == 1 { -1.0 } else { 1.0 };
            }
        }
    }

    pub fn embed(&self, tokens: &[String]) -> DocumentEmbedding {
        if tokens.is_empty() {
            return DocumentEmbedding::zero(self.dim, 0);
        }
        let mut sum = vec![0.0; self.dim];
        for t in tokens {
            self.add_token(t, &mut sum);
        }
        DocumentEmbedding::mean_of(sum, tokens.len(), 0)
    }
}
