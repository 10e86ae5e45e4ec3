use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use zecap::graph::{Graph, VertexPairIndex};

fn random_graph(seed: u64, n: usize) -> Graph {
    Graph::random(n, 0.5, &mut SplitMix64::seed_from_u64(seed))
}

/// Old index (g, h) in G⊠H goes to (h, g) in H⊠G.
fn swap_perm(ng: usize, nh: usize) -> Vec<usize> {
    let gh = VertexPairIndex::new(ng, nh);
    let hg = VertexPairIndex::new(nh, ng);
    (0..ng * nh)
        .map(|i| {
            let (g, h) = gh.decode(i);
            hg.encode(h, g)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn strong_product_commutes(s1 in any::<u64>(), s2 in any::<u64>(), n1 in 0usize..6, n2 in 0usize..6) {
        let (g, h) = (random_graph(s1, n1), random_graph(s2, n2));
        prop_assert_eq!(g.strong_product(&h).relabel(&swap_perm(n1, n2)), h.strong_product(&g));
    }

    #[test]
    fn union_commutes(s1 in any::<u64>(), s2 in any::<u64>(), n1 in 0usize..6, n2 in 0usize..6) {
        let (g, h) = (random_graph(s1, n1), random_graph(s2, n2));
        let perm: Vec<usize> = (0..n1 + n2).map(|v| if v < n1 { v + n2 } else { v - n1 }).collect();
        prop_assert_eq!(g.disjoint_union(&h).relabel(&perm), h.disjoint_union(&g));
    }

    #[test]
    fn operations_associate(s in any::<[u64; 3]>(), n in prop::array::uniform3(0usize..4)) {
        let [a, b, c] = [random_graph(s[0], n[0]), random_graph(s[1], n[1]), random_graph(s[2], n[2])];
        // row-major pairing makes both bracketings use the same index (a*n1 + b)*n2 + c
        prop_assert_eq!(a.strong_product(&b).strong_product(&c), a.strong_product(&b.strong_product(&c)));
        prop_assert_eq!(a.disjoint_union(&b).disjoint_union(&c), a.disjoint_union(&b.disjoint_union(&c)));
    }

    #[test]
    fn product_distributes_over_union(s in any::<[u64; 3]>(), n in prop::array::uniform3(1usize..5)) {
        let [g, h, k] = [random_graph(s[0], n[0]), random_graph(s[1], n[1]), random_graph(s[2], n[2])];
        let lhs = g.strong_product(&h.disjoint_union(&k));
        let rhs = g.strong_product(&h).disjoint_union(&g.strong_product(&k));
        let (nh, nk) = (n[1], n[2]);
        // (x, y) in G⊠(H⊔K) sits at x*(nh+nk) + y
        let perm: Vec<usize> = (0..n[0] * (nh + nk))
            .map(|i| {
                let (x, y) = (i / (nh + nk), i % (nh + nk));
                if y < nh { x * nh + y } else { n[0] * nh + x * nk + (y - nh) }
            })
            .collect();
        prop_assert_eq!(lhs.relabel(&perm), rhs);
    }

    #[test]
    fn complement_of_union_joins_the_parts(s1 in any::<u64>(), s2 in any::<u64>(), n1 in 1usize..6, n2 in 1usize..6) {
        let (g, h) = (random_graph(s1, n1), random_graph(s2, n2));
        let c = g.disjoint_union(&h).complement();
        for u in 0..n1 {
            for v in n1..n1 + n2 {
                prop_assert!(c.has_edge(u, v));
            }
        }
    }

    #[test]
    fn product_degrees(s1 in any::<u64>(), s2 in any::<u64>(), n1 in 1usize..6, n2 in 1usize..6) {
        let (g, h) = (random_graph(s1, n1), random_graph(s2, n2));
        let p = g.strong_product(&h);
        let idx = VertexPairIndex::new(n1, n2);
        for a in 0..n1 {
            for b in 0..n2 {
                prop_assert_eq!(p.degree(idx.encode(a, b)), (g.degree(a) + 1) * (h.degree(b) + 1) - 1);
            }
        }
    }

    #[test]
    fn text_and_json_formats_round_trip(seed in any::<u64>(), n in 0usize..9) {
        let g = random_graph(seed, n);
        let text = zecap::graph::serialize_graph(&g);
        prop_assert_eq!(zecap::graph::parse_graph(text.as_bytes()).unwrap(), g.clone());
        let json = zecap::graph::graph_to_json(&g);
        prop_assert_eq!(zecap::graph::parse_graph(json.as_bytes()).unwrap(), g);
    }
}
