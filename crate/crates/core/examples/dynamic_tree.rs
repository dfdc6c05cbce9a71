//! Drives a dynamic Huffman tree by hand: weight changes that force node
//! swaps, a leaf dropping out at weight zero, and the codewords after each
//! step.

use wacode::HuffmanTree;

fn show(tree: &HuffmanTree<u64>, label: &str) {
    let codes: Vec<String> = tree
        .leaf_weights()
        .into_iter()
        .map(|(s, w)| {
            let bits: String = tree.codeword(s).unwrap().iter().map(|&b| if b { '1' } else { '0' }).collect();
            format!("{}:{w}={bits}", s as char)
        })
        .collect();
    println!("{label:<18} {}", codes.join("  "));
}

fn main() -> Result<(), wacode::Error> {
    let mut tree = HuffmanTree::<u64>::from_weights([(b'a', 4), (b'b', 3), (b'c', 3)])?;
    show(&tree, "initial");
    tree.decrease(b'a', &1)?;
    show(&tree, "a -= 1");
    tree.decrease(b'c', &1)?;
    show(&tree, "c -= 1");

    let mut tree = HuffmanTree::<u64>::from_weights([(b'a', 6), (b'b', 5), (b'c', 4)])?;
    show(&tree, "initial");
    tree.change_weight(b'b', &0)?;
    show(&tree, "b := 0 (removed)");

    let mut tree = HuffmanTree::<u64>::from_weights([(b'a', 0), (b'b', 0), (b'c', 0)])?;
    for s in *b"ccabbb" {
        tree.increase(s, &1)?;
        show(&tree, &format!("{} += 1", s as char));
    }
    tree.check_invariants().expect("sibling property");
    Ok(())
}
