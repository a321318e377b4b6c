//! Deterministic seed derivation.
//!
//! All randomness in a run flows from a single root seed. Child seeds are
//! derived from `(parent, label, index)` with a splitmix64 chain, so any
//! point, trial or measurement setting can be replayed in isolation. The
//! derivation is a stable function of its inputs across platforms and runs.

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed, a stream label and an index.
pub fn derive(parent: u64, label: &str, index: u64) -> u64 {
    let mut h = mix(parent ^ 0x6A09_E667_F3BC_C909);
    for byte in label.bytes() {
        h = mix(h ^ u64::from(byte));
    }
    mix(h ^ index)
}
