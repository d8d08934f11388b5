use blastlab::nn::{check_network_gradients, NetShape, DEFAULT_CONV_CHANNELS};

#[test]
fn full_network_on_4x4x3_input() {
    let shape = NetShape::new(4, 4, 3).with_conv_channels(DEFAULT_CONV_CHANNELS);
    let r = check_network_gradients(shape, 600, 1e-3, 17);
    assert!(r.checked >= 500, "{r:?}");
    assert!(r.passed(), "{r:?}");
}

#[test]
fn narrow_network_every_parameter() {
    let shape = NetShape::new(4, 4, 3).with_conv_channels([4, 4, 4]);
    let r = check_network_gradients(shape, usize::MAX, 1e-3, 2);
    assert!(r.checked > 300);
    assert!(r.passed(), "{r:?}");
}
