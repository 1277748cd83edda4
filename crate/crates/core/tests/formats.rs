use std::path::PathBuf;

use spg_core::io::strategy_player;
use spg_core::rational::rat;
use spg_core::*;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn shipped_fixtures_match_builtins() {
    assert_eq!(parse_game(&fixture("pe.mpg")).unwrap(), example_pe());
    assert_eq!(parse_game(&fixture("px.mpg")).unwrap(), example_px());
}

#[test]
fn px_fixture_brute_value() {
    let g = parse_game(&fixture("px.mpg")).unwrap();
    let (x, _, _) = brute_force_values(&g).unwrap();
    assert_eq!(x[0], rat(19, 20));
}

#[test]
fn pe_strategy_files() {
    let g = parse_game(&fixture("pe.mpg")).unwrap();
    let r = main_solve(&g).unwrap();
    let s0 = serialize_strategy(&r.strategy0);
    let s1 = serialize_strategy(&r.strategy1);
    assert_eq!(s0, "0 1\n");
    assert_eq!(s1, "1 3\n");
    let f0 = parse_strategy(&s0, &g, Player::P0).unwrap();
    let f1 = parse_strategy(&s1, &g, Player::P1).unwrap();
    assert_eq!(strategy_player(&s1, &g), Some(Player::P1));
    let x = mc_parity_value(&induced_mc(&g, &f0, &f1).unwrap()).unwrap();
    assert_eq!(x[0], rat(19, 20));
}

#[test]
fn strategy_must_be_total_and_on_edges() {
    let g = example_pe();
    assert!(parse_strategy("", &g, Player::P0).is_err());
    assert_eq!(
        parse_strategy("0 5\n", &g, Player::P0).unwrap_err(),
        Error::NonEdgeChoice { line: 1 }
    );
    assert_eq!(
        parse_strategy("1 0\n", &g, Player::P0).unwrap_err(),
        Error::NonEdgeChoice { line: 1 }
    );
}

#[test]
fn validation_errors_carry_lines() {
    let text = "mpg parity\nvertex 0 0 0\nvertex 1 r 0\nedge 0 1\nedge 1 1 1/2\nedge 1 0 1/3\n";
    match parse_game(text).unwrap_err() {
        Error::AtLine { line, source } => {
            assert_eq!(line, 3);
            assert!(matches!(*source, Error::BadDistribution { vertex: 1, .. }));
        }
        e => panic!("{e:?}"),
    }
    let sink = "mpg parity\nvertex 0 0 0\nvertex 1 1 1\nedge 0 1\n";
    assert!(matches!(parse_game(sink).unwrap_err(), Error::AtLine { line: 3, .. }));
    let dup = "mpg parity\nvertex 0 0 0\nedge 0 0\nedge 0 0\n";
    assert!(matches!(parse_game(dup).unwrap_err(), Error::AtLine { line: 4, .. }));
    let missing = "mpg parity\nvertex 0 r 0\nedge 0 0\n";
    assert!(matches!(
        parse_game(missing).unwrap_err(),
        Error::AtLine { line: 3, .. }
    ));
}

#[test]
fn gadget_serialises_as_reach_game() {
    let gg = build_gadget(&example_pe(), &rat(1, 10)).unwrap();
    let text = serialize_game(&gg.game);
    assert!(text.starts_with("mpg reach\n"));
    assert!(text.ends_with(&format!("target {}\n", gg.won)));
    assert_eq!(parse_game(&text).unwrap(), gg.game);
}

#[test]
fn battlefield_round_trips() {
    let g = battlefield(7, 1, &rat(1, 2), BattleObjective::Zone1ThenZone2).unwrap();
    assert_eq!(parse_game(&serialize_game(&g)).unwrap(), g);
}
