//! Seeded random streams and uniform sampling on the simplex.
//!
//! Every consumer derives independent ChaCha streams from `(seed, index)`, so
//! results do not depend on how work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

/// An RNG for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fills `out` with a uniformly distributed point of the simplex, in
/// barycentric coordinates, by normalizing independent unit exponentials.
pub fn uniform_barycentric<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut total = 0.0;
        for c in out.iter_mut() {
            let e: f64 = rng.sample(Exp1);
            *c = e;
            total += e;
        }
        if total > 0.0 {
            out.iter_mut().for_each(|c| *c /= total);
            return;
        }
    }
}
