use shiftlab_core::constructions::reduction::*;
use shiftlab_core::machines::toy_tree_pair;
use shiftlab_core::perm::Perm;

fn main() {
    let (t0, t1) = toy_tree_pair();
    let pi = Perm::three_cycle(6, 3, 4, 5).unwrap();
    let r = Reduction::new(&t0, &t1, &[0, 1], 6, &pi).unwrap();
    let tree = r.accepting_tree().unwrap();
    let config = r.encode_tree(&tree, 3);
    let out = r.reference(&config).unwrap();
    for cell in out.cells.keys().chain(config.cells.keys()) {
        if out.get(cell) != config.get(cell) {
            println!("diff at {} : {} -> {}", r.group.format(cell), config.get(cell), out.get(cell));
        }
    }
}
