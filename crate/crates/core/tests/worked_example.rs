//! Euler derivations on the plane transported by `(x, y) -> ((x-1)(y-1)+1, y)`.

use gmact_core::expr::parse_ratfunc;
use gmact_core::{action_from_derivation, BirationalMap, Context, Derivation, GmAction, RatFunc};

fn ctx() -> Context {
    Context::new(&["x", "y"]).unwrap()
}

fn r(s: &str) -> RatFunc {
    parse_ratfunc(s, &ctx()).unwrap()
}

fn rt(s: &str) -> RatFunc {
    parse_ratfunc(s, &GmAction::extended_context(&ctx()).unwrap()).unwrap()
}

fn map() -> BirationalMap {
    BirationalMap::new(&ctx(), vec![r("(x-1)*(y-1)+1"), r("y")], vec![r("(x-1)/(y-1)+1"), r("y")]).unwrap()
}

#[test]
fn conjugated_euler_derivations_and_their_actions() {
    for (a, b) in [(2, 3), (1, 1), (-1, 4)] {
        let d = Derivation::euler(&ctx(), &[a, b]).unwrap().conjugate(&map()).unwrap();
        assert_eq!(d.image(0), &r(&format!("({a}*((x-1)*(y-1)+1) - {b}*(x-1)*y)/(y-1)")));
        assert_eq!(d.image(1), &r(&format!("{b}*y")));

        let cert = action_from_derivation(&d, 16, 7).unwrap();
        let action = cert.action().unwrap_or_else(|| panic!("({a}, {b}) not certified: {cert}"));
        let tb = if b == 1 { "t".to_string() } else { format!("t^{b}") };
        let ta = match a {
            1 => "t".to_string(),
            a if a < 0 => format!("t^({a})"),
            a => format!("t^{a}"),
        };
        assert_eq!(action.image(0), &rt(&format!("({ta}*((x-1)*(y-1)+1)-1)/({tb}*y-1) + 1")));
        assert_eq!(action.image(1), &rt(&format!("{tb}*y")));
        assert_eq!(action.extract_derivation().unwrap(), d);
    }
}
