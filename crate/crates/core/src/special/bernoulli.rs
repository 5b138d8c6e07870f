//! Even-index Bernoulli numbers, exact and as cached floats.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rug::{Float, Integer, Rational};

static EXACT: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
static FLOATS: OnceLock<RwLock<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();

/// `B_0, B_2, …, B_{2(count-1)}` as exact rationals.
pub fn bernoulli_even_exact(count: usize) -> Vec<Rational> {
    let lock = EXACT.get_or_init(|| RwLock::new(vec![Rational::from(1)]));
    {
        let cached = lock.read().expect("bernoulli cache poisoned");
        if cached.len() >= count {
            return cached[..count].to_vec();
        }
    }
    let mut cached = lock.write().expect("bernoulli cache poisoned");
    while cached.len() < count {
        let k = cached.len() as u32;
        let m = 2 * k;
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0 with B_1 = -1/2 and odd B_j = 0 beyond.
        let mut sum = Rational::from(1) - Rational::from((Integer::from(m + 1), 2));
        for i in 1..k {
            let c = Integer::from(Integer::binomial_u(m + 1, 2 * i));
            sum += Rational::from(c * &cached[i as usize]);
        }
        let b = -sum / Rational::from(m + 1);
        cached.push(b);
    }
    cached[..count].to_vec()
}

/// `B_{2k}` for `k < count`, rounded to `prec` bits. Shared across threads.
pub fn bernoulli_even(count: usize, prec: u32) -> Arc<Vec<Float>> {
    let lock = FLOATS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = lock.read().expect("bernoulli cache poisoned").get(&prec) {
        if v.len() >= count {
            return Arc::clone(v);
        }
    }
    let n = count.max(16).next_power_of_two();
    let exact = bernoulli_even_exact(n);
    let floats: Vec<Float> = exact.iter().map(|b| Float::with_val(prec, b)).collect();
    let arc = Arc::new(floats);
    lock.write()
        .expect("bernoulli cache poisoned")
        .insert(prec, Arc::clone(&arc));
    arc
}
