//! Regenerates the bundled fixture files under `fixtures/`.
//!
//! The φ-parameterized families are instantiated at φ ∈ {π/4, π/3, 1, 2};
//! run from the workspace root (or pass the target directory).

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

/// One ulp below `FRAC_PI_3`; pinned so the bundled file name stays stable.
const PI_THIRD: f64 = 1.047_197_551_196_597_6;

use chanspec::fixture::{families, ChannelFixture};
use chanspec::KrausChannel;

fn meta(pairs: &[(&str, serde_json::Value)]) -> BTreeMap<String, serde_json::Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn phi_fixture(family: &str, phi: f64, channel: KrausChannel) -> (String, ChannelFixture) {
    let name = format!("{family}_phi_{phi}");
    let fixture = ChannelFixture::from_channel(
        &name,
        &channel,
        meta(&[("family", family.into()), ("phi", serde_json::json!(phi))]),
    );
    (format!("{name}.json"), fixture)
}

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    std::fs::create_dir_all(&dir).expect("create fixture directory");

    let mut entries: Vec<(String, ChannelFixture)> = Vec::new();
    for phi in [FRAC_PI_4, 1.0, 2.0] {
        entries.push(phi_fixture("example1", phi, families::example1(phi)));
    }
    for phi in [PI_THIRD, 1.0, 2.0] {
        entries.push(phi_fixture("example2", phi, families::example2(phi)));
    }
    entries.push((
        "nonunital_qutrit.json".into(),
        ChannelFixture::from_channel(
            "nonunital_qutrit",
            &families::nonunital_qutrit(),
            meta(&[("family", "nonunital_qutrit".into())]),
        ),
    ));
    entries.push((
        "identity_channel.json".into(),
        ChannelFixture::from_channel(
            "identity_channel",
            &families::identity_channel(2),
            meta(&[("family", "identity_channel".into())]),
        ),
    ));
    entries.push((
        "depolarizing_p_0.5.json".into(),
        ChannelFixture::from_channel(
            "depolarizing_p_0.5",
            &families::depolarizing(0.5),
            meta(&[
                ("family", "depolarizing".into()),
                ("p", serde_json::json!(0.5)),
            ]),
        ),
    ));
    entries.push((
        "amplitude_damping_gamma_0.5.json".into(),
        ChannelFixture::from_channel(
            "amplitude_damping_gamma_0.5",
            &families::amplitude_damping(0.5),
            meta(&[
                ("family", "amplitude_damping".into()),
                ("gamma", serde_json::json!(0.5)),
            ]),
        ),
    ));
    entries.push((
        "weyl_shift_qutrit.json".into(),
        ChannelFixture::from_channel(
            "weyl_shift_qutrit",
            &families::weyl_shift_qutrit(0.3),
            meta(&[
                ("family", "weyl_shift_qutrit".into()),
                ("p", serde_json::json!(0.3)),
            ]),
        ),
    ));

    for (file, fixture) in &entries {
        let path = dir.join(file);
        fixture.save(&path).expect("write fixture");
        println!("wrote {}", path.display());
    }
}
