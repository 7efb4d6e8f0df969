#[allow(dead_code)]
mod catalog {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/catalog.rs"));
}
#[allow(dead_code)]
mod empirical_decomposition {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/empirical_decomposition.rs"));
}
#[allow(dead_code)]
mod replacement_tables {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/replacement_tables.rs"));
}
#[allow(dead_code)]
mod chained_decomposition {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/chained_decomposition.rs"));
}
#[allow(dead_code)]
mod closest_local {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/closest_local.rs"));
}
#[allow(dead_code)]
mod detection_efficiency {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/detection_efficiency.rs"));
}
#[allow(dead_code)]
mod vertex_enumeration {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/vertex_enumeration.rs"));
}
#[allow(dead_code)]
mod estimator {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/estimator.rs"));
}
#[allow(dead_code)]
mod cli_usage {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_usage.rs"));
}

#[test]
fn catalog_example() {
    catalog::run_example().unwrap();
}

#[test]
fn empirical_decomposition_example() {
    empirical_decomposition::run_example().unwrap();
}

#[test]
fn replacement_tables_example() {
    replacement_tables::run_example().unwrap();
}

#[test]
fn chained_decomposition_example() {
    chained_decomposition::run_example().unwrap();
}

#[test]
fn closest_local_example() {
    closest_local::run_example().unwrap();
}

#[test]
fn detection_efficiency_example() {
    detection_efficiency::run_example().unwrap();
}

#[test]
fn vertex_enumeration_example() {
    vertex_enumeration::run_example().unwrap();
}

#[test]
fn estimator_example() {
    estimator::run_example().unwrap();
}

#[test]
fn cli_usage_example() {
    cli_usage::run_example().unwrap();
}
