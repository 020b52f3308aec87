//! Values frozen from the reference implementations on the mini-corpus.

pub const DOCUMENTS: u64 = 30;
pub const CORPUS_BYTES: u64 = 224_262;
pub const FINGERPRINT: u64 = 0xeb98_4028_8afc_cc5c;
pub const TH_RANK: u32 = 210;
pub const FIRST_MERGES: [(&str, &str, u64); 5] = [
    (" ", "t", 6307),
    ("h", "e", 5292),
    (" ", "a", 5067),
    ("i", "n", 3382),
    (" t", "he", 3359),
];
pub const BPE_TOKENS: u64 = 63_143;
pub const LBPE_TOKENS: u64 = 62_989;
pub const BPE_BUCKETS: [u64; 6] = [33_128, 25_449, 4_154, 412, 0, 0];
pub const LBPE_BUCKETS: [u64; 6] = [32_310, 25_997, 4_259, 423, 0, 0];
pub const BPE_IDS_FNV: u64 = 0xb951_8664_31c2_78ba;
pub const LBPE_IDS_FNV: u64 = 0x5b49_2b15_b710_c8c7;
/// Bytes per token at four decimals.
pub const BPE_BYTES_PER_TOKEN: &str = "3.5517";
pub const LBPE_BYTES_PER_TOKEN: &str = "3.5603";
