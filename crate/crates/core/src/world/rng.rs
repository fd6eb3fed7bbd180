//! Named random streams with serializable position.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Seed of the stream called `name` under a master seed. Streams with
/// different names are independent, so adding an animat does not perturb
/// the draws of another.
pub fn stream_seed(master: u64, name: &str) -> u64 {
    // FNV-1a over the name, then a splitmix64 finaliser over the mix.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = master ^ h.rotate_left(17);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A counter-based generator whose state is its seed plus word position.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn named(master: u64, name: &str) -> Self {
        Self::from_seed(stream_seed(master, name))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            lo
        } else {
            self.rng.gen_range(lo..hi)
        }
    }
}

impl PartialEq for RngStream {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed && self.word_pos() == other.word_pos()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

#[derive(Serialize, Deserialize, schemars::JsonSchema)]
struct StreamState {
    seed: u64,
    /// Decimal; the position can exceed what JSON numbers carry exactly.
    word_pos: String,
}

impl Serialize for RngStream {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        StreamState {
            seed: self.seed,
            word_pos: self.word_pos().to_string(),
        }
        .serialize(s)
    }
}

impl schemars::JsonSchema for RngStream {
    fn schema_name() -> std::borrow::Cow<'static, str> {
        "RngStream".into()
    }

    fn json_schema(generator: &mut schemars::SchemaGenerator) -> schemars::Schema {
        StreamState::json_schema(generator)
    }
}

impl<'de> Deserialize<'de> for RngStream {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let st = StreamState::deserialize(d)?;
        let pos: u128 = st.word_pos.parse().map_err(serde::de::Error::custom)?;
        let mut out = RngStream::from_seed(st.seed);
        out.rng.set_word_pos(pos);
        Ok(out)
    }
}
