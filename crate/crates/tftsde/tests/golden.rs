use tftsde::catalog::Catalog;
use tftsde::sde::{compare_equations, generate_sde, parse_fixture, YTermTable};

fn check(name: &str) {
    let cat = Catalog::new(3);
    let table = YTermTable::builtin();
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let fx = parse_fixture(&std::fs::read_to_string(&path).unwrap(), &cat).unwrap();
    let eq = generate_sde(&fx.word, fx.component, fx.beta).unwrap();
    let diff = compare_equations(&eq, &fx.equation, &table, &cat).unwrap();
    assert!(diff.is_empty(), "{name}: {} unmatched\n{}", diff.len(), diff.join("\n"));
}

#[test]
fn two_melons() {
    check("mm.txt");
}

#[test]
fn three_melons() {
    check("mmm.txt");
}

#[test]
fn melon_and_pillow_from_melon() {
    check("m_v1.txt");
}

#[test]
fn pillow_and_melon_from_pillow() {
    check("v1_m.txt");
}
