use shiftlab_core::ca::*;
use shiftlab_core::groups::*;
use shiftlab_core::perm::Perm;
use std::time::Instant;

fn main() {
    let alphabet = ProductAlphabet::new(vec![6, 2]);
    let group = Group::zd(2);
    let mut eng = Engine::new(group.clone(), alphabet.clone());
    let pi = Perm::three_cycle(6, 0, 1, 2).unwrap();
    let sites = vec![GroupElement::Zd(vec![1, 0]), GroupElement::Zd(vec![0, 1])];
    let t0 = Instant::now();
    let word = build_phi_set(&group, &alphabet, 0, 1, &pi, 4, &sites).unwrap();
    println!("build: {:?} letters={}", t0.elapsed(), word.letter_count());
    let t1 = Instant::now();
    let id = group.identity();
    let needs = eng.needed_support(&word, std::slice::from_ref(&id)).unwrap();
    println!("needs: {:?} cells={}", t1.elapsed(), needs.len());
    let mut pattern = Pattern::default();
    for (c, _) in &needs { pattern.cells.insert(c.clone(), 3); }
    pattern.cells.insert(id.clone(), 5);
    let t2 = Instant::now();
    for _ in 0..100 {
        let _ = eng.eval_pattern_at(&word, &pattern, &id).unwrap();
    }
    println!("100 evals: {:?}", t2.elapsed());
}
