use std::time::Instant;
use mooreset::field::field_create;
use mooreset::moore::{moore_check_kernel, ExponentSet};
use mooreset::par::ParHint;

fn main() {
    let t0 = Instant::now();
    let ctx = field_create(3, 1, 7, None, None).unwrap();
    println!("ctx(3,7) build: {:?}", t0.elapsed());

    let t = Instant::now();
    let iset = ExponentSet::new(vec![0, 1, 3], 7).unwrap();
    let v = moore_check_kernel(&ctx, &iset, ParHint::new(4), None).unwrap();
    println!("check {{0,1,3}} q=3 n=7: moore={} work={} in {:?}", v.is_moore, v.work, t.elapsed());

    let t = Instant::now();
    let iset = ExponentSet::new(vec![0, 1, 2, 5], 7).unwrap();
    let v = moore_check_kernel(&ctx, &iset, ParHint::new(4), None).unwrap();
    println!("check {{0,1,2,5}} q=3 n=7: moore={} work={} in {:?}", v.is_moore, v.work, t.elapsed());

    let t0 = Instant::now();
    let ctx = field_create(2, 1, 15, None, None).unwrap();
    println!("ctx(2,15) build: {:?}", t0.elapsed());
    let t = Instant::now();
    let iset = ExponentSet::new(vec![0, 1, 3], 15).unwrap();
    let v = moore_check_kernel(&ctx, &iset, ParHint::new(4), None).unwrap();
    println!("check {{0,1,3}} q=2 n=15: moore={} work={} in {:?}", v.is_moore, v.work, t.elapsed());
    if let Some(w) = v.witness {
        println!("witness verifies: {}", w.verify(&ctx, &iset));
    }
}
