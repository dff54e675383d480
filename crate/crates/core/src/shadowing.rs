//! Counter-based normal draws for per-link shadowing.
//!
//! Stream definition (stable, so other implementations can reproduce it):
//!
//! ```text
//! mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!          z =  z ^ (z >> 31)                         (wrapping u64 arithmetic)
//! word(seed, key, i) = mix(seed + 0x9E3779B97F4A7C15 * (2*key + i + 1))
//! uniform(w)         = ((w >> 11) + 0.5) / 2^53       in (0, 1)
//! normal(seed, key)  = sqrt(-2 ln u1) * cos(2 pi u2),
//!                      u1 = uniform(word(seed, key, 0)), u2 = uniform(word(seed, key, 1))
//! ```
//!
//! `key` is the cell id. Each link gets exactly one draw for the whole run,
//! independent of the antenna mode, so A/B runs with the same seed share it.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn word(seed: u64, key: u64, i: u64) -> u64 {
    let counter = key.wrapping_mul(2).wrapping_add(i).wrapping_add(1);
    mix(seed.wrapping_add(GOLDEN.wrapping_mul(counter)))
}

fn uniform(w: u64) -> f64 {
    ((w >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Standard normal draw addressed by `(seed, key)`.
pub fn standard_normal(seed: u64, key: u64) -> f64 {
    let u1 = uniform(word(seed, key, 0));
    let u2 = uniform(word(seed, key, 1));
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Shadowing offset in dB for one link.
pub fn shadowing_db(sigma: f64, seed: u64, cell_id: u32) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        sigma * standard_normal(seed, u64::from(cell_id))
    }
}
