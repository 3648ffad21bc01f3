//! Named, seedable random streams, one per `(purpose, site, point, shot)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::LensIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    AtomCount = 1,
    Ensemble = 2,
    Detection = 3,
    Image = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, purpose: StreamPurpose, site: LensIndex, point: usize, shot: usize) -> ChaCha8Rng {
    let mut id = splitmix64(purpose as u64);
    for v in [site.i as u64, site.j as u64, point as u64, shot as u64] {
        id = splitmix64(id ^ v);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
