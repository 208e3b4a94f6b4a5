//! Polytree refinement of a structured grid around a point, with and without
//! the one-level balance rule, and the resulting polygon mix.

use std::collections::BTreeMap;

use polyfrac::mesh::{generate_structured, refine_polytree, write_mesh, PolyMesh, Rect, RefinementPlan};

fn census(label: &str, mesh: &PolyMesh) {
    let mut by_size: BTreeMap<usize, usize> = BTreeMap::new();
    for ring in mesh.elements() {
        *by_size.entry(ring.len()).or_default() += 1;
    }
    let mix: Vec<String> = by_size.iter().map(|(n, c)| format!("{c} x {n}-gon")).collect();
    println!(
        "{label}: {} elements, {} nodes, area {:.12}, smallest diameter {:.4} ({})",
        mesh.num_elements(),
        mesh.num_nodes(),
        mesh.total_area(),
        mesh.min_element_diameter(),
        mix.join(", ")
    );
}

fn main() -> polyfrac::Result<()> {
    let base = generate_structured(Rect::new(0.0, 0.0, 8.0, 4.0), 8, 4, &[])?;
    census("base", &base);
    let spot = Rect::new(3.0, 0.0, 4.0, 1.0);
    for balance in [false, true] {
        let fine = refine_polytree(&base, &RefinementPlan::in_box(&base, &spot, 3, balance))?;
        census(if balance { "balanced" } else { "unbalanced" }, &fine);
    }

    let small = refine_polytree(&base, &RefinementPlan::new(vec![0], vec![1], true))?;
    let mut text = Vec::new();
    write_mesh(&small, &mut text).expect("in-memory write");
    println!("\nfirst lines of the mesh file:");
    for line in String::from_utf8_lossy(&text).lines().take(12) {
        println!("  {line}");
    }
    Ok(())
}
