use densekatz::experiment::*;
use densekatz::*;
use densekatz::katz::*;
fn main() {
    let g = synthetic_sparse_graph(1000, 7).unwrap();
    let opts = KatzOptions::default();
    let est = linalg::spectral_radius(|v, o| g.adjacency().mul_vec_into(v, o), 1000, &Default::default());
    println!("{:?}", est);
    let t = 0.9 / est.validation_radius();
    let d = katz_direct(&g, t, &opts).unwrap();
    let c = katz(&g, &KatzParams { t, route: KatzRoute::ComplementForced, rho_hint: None }, &opts).unwrap();
    let w = c.rescaled();
    let maxrel = d.v.iter().zip(&w).map(|(a, b)| ((a - b) / a).abs()).fold(0.0, f64::max);
    let rd = rank(&d.v).unwrap(); let rc = rank(&w).unwrap();
    println!("maxrel {maxrel:e} ties {} {} same {}", rd.tie_groups.len(), rc.tie_groups.len(), rd.order == rc.order);
    println!("{:?}", c.certificates);
    for (k,(a,b)) in rd.order.iter().zip(&rc.order).enumerate() { if a != b { println!("{k}: {a} {} | {b} {}", d.v[*a], d.v[*b]); break; } }
}
