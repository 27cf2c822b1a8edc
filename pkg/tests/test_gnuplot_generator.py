from file_generator.gnuplot_generator import GnuplotScriptGenerator


def test_line_plot_references_the_csv(tmp_path):
    generator = GnuplotScriptGenerator(tmp_path / "data" / "u.csv", tmp_path / "u.gp", "q=0.5")
    script = generator.create_line_plot().getvalue()
    assert "set datafile separator ','" in script
    assert "set output 'u.png'" in script
    assert "'data/u.csv' using 1:2" in script
    assert "using 1:3" not in script


def test_line_plot_overlays_the_closed_form(tmp_path):
    generator = GnuplotScriptGenerator(tmp_path / "u.csv", tmp_path / "u.gp", "q=0.5")
    assert "using 1:3" in generator.create_line_plot(with_exact=True).getvalue()


def test_surface_plot_and_write(tmp_path):
    generator = GnuplotScriptGenerator(tmp_path / "u2d.csv", tmp_path / "plots" / "u2d.gp", "2D")
    path = generator.write(generator.create_surface_plot())
    script = path.read_text()
    assert "set pm3d" in script
    assert "awk" not in script
    assert "../u2d.csv" in script
    assert "splot '../u2d.csv' using 1:2:3 skip 1" in script
