use num_traits::{One, Zero};
use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use proptest::strategy::Strategy as Gen;
use spg_core::rational::rat;
use spg_core::*;

fn spec_strategy(max_n: usize) -> impl Gen<Value = GenSpec> {
    (any::<u64>(), 1..=max_n, 1usize..=3, 1u32..=4, 1u64..=5, 0usize..4).prop_map(|(seed, n, out, prio, den, mix)| {
        let owner_mix = match mix {
            0 => [rat(1, 3), rat(1, 3), rat(1, 3)],
            1 => [rat(1, 2), rat(0, 1), rat(1, 2)],
            2 => [rat(1, 4), rat(1, 4), rat(1, 2)],
            _ => [rat(1, 2), rat(1, 2), rat(0, 1)],
        };
        GenSpec {
            seed,
            n_vertices: n,
            owner_mix,
            max_out_degree: out,
            n_priorities: prio,
            weight_denominator_bound: den,
        }
    })
}

/// Plain random games and games with absorbing win/lose sinks.
fn game_strategy(max_n: usize) -> impl Gen<Value = Game> {
    (spec_strategy(max_n), any::<bool>()).prop_map(|(spec, sinks)| {
        if sinks && spec.n_vertices >= 3 {
            random_game_with_sinks(&spec).unwrap()
        } else {
            random_game(&spec).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_games_validate_and_round_trip(g in game_strategy(9)) {
        prop_assert!(validate_game(&g).is_ok());
        let text = serialize_game(&g);
        let back = parse_game(&text).unwrap();
        prop_assert_eq!(serialize_game(&back), text);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn main_solve_matches_enumeration(g in game_strategy(6)) {
        let r = main_solve(&g).unwrap();
        let (brute, _, _) = brute_force_values(&g).unwrap();
        prop_assert!(r.values.in_unit_interval());
        prop_assert_eq!(&r.values, &brute);
    }

    #[test]
    fn returned_strategies_are_mutually_optimal(g in game_strategy(8)) {
        let r = main_solve(&g).unwrap();
        prop_assert!(r.strategy0.check(&g).is_ok());
        prop_assert!(r.strategy1.check(&g).is_ok());
        let pair = mc_parity_value(&induced_mc(&g, &r.strategy0, &r.strategy1).unwrap()).unwrap();
        prop_assert_eq!(&pair, &r.values);
        let (vs0, _) = mdp_parity_value(&induced_mdp(&g, &r.strategy0).unwrap(), Mode::Minimize).unwrap();
        prop_assert_eq!(&vs0, &r.values);
        let (vs1, _) = mdp_parity_value(&induced_mdp(&g, &r.strategy1).unwrap(), Mode::Maximize).unwrap();
        prop_assert_eq!(&vs1, &r.values);
    }

    #[test]
    fn dual_game_complements_values(g in game_strategy(8)) {
        let x = main_solve(&g).unwrap().values;
        let y = main_solve(&g.dual()).unwrap().values;
        for v in 0..g.num_vertices() {
            prop_assert_eq!(x[v].clone() + &y[v], Rational::one());
        }
    }

    #[test]
    fn qualitative_regions_are_the_value_extremes(g in game_strategy(6)) {
        let q = quali_solve(&g).unwrap();
        let (brute, _, _) = brute_force_values(&g).unwrap();
        for v in 0..g.num_vertices() {
            prop_assert_eq!(q.w0.contains(v), brute[v].is_one());
            prop_assert_eq!(q.w1.contains(v), brute[v].is_zero());
        }
        // The witness wins almost surely on W0 against every Player 1 strategy.
        prop_assert!(q.witness.check(&g).is_ok());
        let (x, _) = mdp_parity_value(&induced_mdp(&g, &q.witness).unwrap(), Mode::Minimize).unwrap();
        for v in q.w0.iter() {
            prop_assert!(x[v].is_one());
        }
    }

    #[test]
    fn reach_solve_matches_parity_encoding(g in game_strategy(6)) {
        let n = g.num_vertices();
        let target = RegionSet::from_predicate(n, |v| g.priority(v) == 0);
        let r = reach_solve(&g, &target).unwrap();
        // Reaching the target is the parity objective of the game where target
        // vertices are absorbing at priority 0 and all others have priority 1.
        let mut b = GameBuilder::parity();
        for v in 0..n {
            if target.contains(v) {
                b.add_vertex(Owner::Random, Some(0), None);
            } else {
                b.add_vertex(g.owner(v), Some(1), None);
            }
        }
        for v in 0..n {
            if target.contains(v) {
                b.wedge(v, v, rat(1, 1));
            } else {
                for (w, p) in g.edges(v) {
                    b.add_edge(v, w, p.cloned());
                }
            }
        }
        let (brute, _, _) = brute_force_values(&b.build().unwrap()).unwrap();
        prop_assert_eq!(&r.values, &brute);
        prop_assert!(zero_value_region(&g, &target).iter().all(|v| r.values[v].is_zero()));
    }

    #[test]
    fn improvement_values_never_drop(g in game_strategy(7)) {
        let f = Strategy::first_successor(&g, Player::P0);
        let r = improve_with(&g, &f, &SolveOptions::default().with_trace()).unwrap();
        let trace = r.trace.unwrap();
        let chain = spg_core::improve::evaluated_values(&trace);
        for pair in chain.windows(2) {
            prop_assert!(pair[1].strictly_dominates(pair[0]));
        }
        prop_assert_eq!(r.values, main_solve(&g).unwrap().values);
    }

    #[test]
    fn gadget_shape_and_oracle(g in game_strategy(4)) {
        let n = g.num_vertices();
        let gg = build_gadget(&g, &rat(1, 3)).unwrap();
        prop_assert!(validate_game(&gg.game).is_ok());
        prop_assert_eq!(gg.game.num_vertices(), 2 * n + 2);
        prop_assert_eq!(gg.game.num_edges(), g.num_edges() + 2 * n + 2);
        let oracle = oracle_solve_via_reduction(&g).unwrap();
        prop_assert_eq!(oracle.values, main_solve(&g).unwrap().values);
    }

    #[test]
    fn generation_is_deterministic(spec in spec_strategy(12)) {
        let a = serialize_game(&random_game(&spec).unwrap());
        let b = serialize_game(&random_game(&spec).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn all_random_spec_gives_a_markov_chain() {
    let mut spec = GenSpec::small(1, 8);
    spec.owner_mix = [rat(0, 1), rat(0, 1), rat(1, 1)];
    let g = random_game(&spec).unwrap();
    assert!(g.is_mc());
    let x = mc_parity_value(&g).unwrap();
    assert!(x.in_unit_interval());
}

#[test]
fn pe_agrees_across_solvers() {
    let g = example_pe();
    let main = main_solve(&g).unwrap();
    assert_eq!(main.values[0], rat(19, 20));
    assert_eq!(brute_force_values(&g).unwrap().0, main.values);
    assert_eq!(oracle_solve_via_reduction(&g).unwrap().values, main.values);
}

#[test]
fn px_values() {
    let r = main_solve(&example_px()).unwrap();
    let (brute, _, _) = brute_force_values(&example_px()).unwrap();
    assert_eq!(r.values, brute);
    assert_eq!(r.values[5], rat(1, 2));
    assert_eq!(r.values[6], rat(1, 2));
}

#[test]
fn timeouts_are_reported() {
    let opts = SolveOptions::default().with_timeout(std::time::Duration::ZERO);
    assert_eq!(main_solve_with(&example_pe(), &opts).unwrap_err(), Error::Timeout);
    assert_eq!(brute_force_with(&example_pe(), &opts).unwrap_err(), Error::Timeout);
}

#[test]
fn battlefield_without_bullets_is_won() {
    let g = battlefield(7, 0, &rat(1, 2), BattleObjective::ReachZone1).unwrap();
    assert!(main_solve(&g).unwrap().values[0].is_one());
}

#[test]
fn two_zone_objective_is_harder() {
    let p = rat(1, 2);
    let one = battlefield(7, 1, &p, BattleObjective::ReachZone1).unwrap();
    let two = battlefield(7, 1, &p, BattleObjective::Zone1ThenZone2).unwrap();
    let a = main_solve(&one).unwrap().values[0].clone();
    let b = main_solve(&two).unwrap().values[0].clone();
    assert!(b <= a, "{b} > {a}");
    assert!(b > Rational::zero());
}
