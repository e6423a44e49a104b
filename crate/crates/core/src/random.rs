//! Random instances for cross-checking and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

/// Shape of generated instances. Variables are drawn from `A..`, constants
/// from `a..`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceShape {
    pub variables: usize,
    pub constants: usize,
    pub max_m: usize,
    pub max_n: usize,
    /// Bias toward few, heavily repeated variables and texts built from
    /// pattern images, which exercises long shifts.
    pub adversarial: bool,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            variables: 3,
            constants: 3,
            max_m: 10,
            max_n: 50,
            adversarial: false,
        }
    }
}

fn var_byte(i: usize) -> u8 {
    b'A' + i as u8
}

fn const_byte(i: usize) -> u8 {
    b'a' + i as u8
}

/// A random pattern of exactly `m` symbols.
pub fn random_pattern<R: Rng>(rng: &mut R, shape: &InstanceShape, m: usize) -> Vec<u8> {
    let vars = shape.variables.clamp(0, 26);
    let consts = shape.constants.clamp(1, 26);
    let var_share = if shape.adversarial { 0.8 } else { 0.5 };
    let pool = if shape.adversarial {
        rng.gen_range(1..=vars.max(1)).min(vars)
    } else {
        vars
    };
    (0..m)
        .map(|_| {
            if pool > 0 && rng.gen_bool(var_share) {
                var_byte(rng.gen_range(0..pool))
            } else {
                const_byte(rng.gen_range(0..consts))
            }
        })
        .collect()
}

/// A random text of exactly `n` symbols; adversarial texts splice in images
/// of `pattern` under random substitutions.
pub fn random_text<R: Rng>(rng: &mut R, shape: &InstanceShape, pattern: &[u8], n: usize) -> Vec<u8> {
    let consts = shape.constants.clamp(1, 26);
    let mut text: Vec<u8> = (0..n).map(|_| const_byte(rng.gen_range(0..consts))).collect();
    if shape.adversarial && !pattern.is_empty() && n >= pattern.len() {
        let plants = rng.gen_range(0..=n / pattern.len());
        for _ in 0..plants {
            let mut image = [0u8; 26];
            let mut letters: Vec<u8> = (0..consts).map(const_byte).collect();
            letters.shuffle(rng);
            for (i, slot) in image.iter_mut().enumerate() {
                *slot = if rng.gen_bool(0.5) {
                    letters[i % letters.len()]
                } else {
                    const_byte(rng.gen_range(0..consts))
                };
            }
            let at = rng.gen_range(0..=n - pattern.len());
            for (j, &b) in pattern.iter().enumerate() {
                text[at + j] = if b.is_ascii_uppercase() {
                    image[(b - b'A') as usize]
                } else {
                    b
                };
            }
        }
    }
    text
}

/// A random (pattern, text) pair within `shape`.
pub fn random_instance<R: Rng>(rng: &mut R, shape: &InstanceShape) -> (Vec<u8>, Vec<u8>) {
    let m = rng.gen_range(1..=shape.max_m.max(1));
    let pattern = random_pattern(rng, shape, m);
    let n = rng.gen_range(0..=shape.max_n);
    let text = random_text(rng, shape, &pattern, n);
    (pattern, text)
}
