use std::io::Write;

use abcd::ingest::{load, write_canonical, IngestError, SourceFormat};

#[test]
fn missing_file_names_the_path() {
    match load("/nonexistent/graph.tsv", SourceFormat::Konect) {
        Err(IngestError::Io { path, .. }) => assert!(path.ends_with("graph.tsv")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn konect_file_round_trips_through_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("out.toy");
    let mut f = std::fs::File::create(&src).unwrap();
    writeln!(f, "% sym signed\n% 4 3 3\n1 2 1\n2 3 -1\n3 1 -2\n3 4").unwrap();
    let g = load(&src, SourceFormat::Konect).unwrap().to_graph();
    assert_eq!((g.vertex_count(), g.edge_count(), g.negative_edge_count()), (4, 4, 2));

    let dst = dir.path().join("toy.txt");
    write_canonical(&g, std::fs::File::create(&dst).unwrap()).unwrap();
    let back = load(&dst, SourceFormat::Canonical).unwrap().to_graph();
    assert_eq!(back.edges(), g.edges());
    assert_eq!(back.labels(), g.labels());
}

#[test]
fn bad_weight_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("bad.tsv");
    std::fs::write(&src, "1 2 1\n2 3 heavy\n").unwrap();
    match load(&src, SourceFormat::Konect) {
        Err(IngestError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
}
