import logging
import os
from io import StringIO
from pathlib import Path

logger = logging.getLogger(__name__)


class GnuplotScriptGenerator:
    """
    Builds a gnuplot script that plots a CSV written by result_writer.
    The CSV is referenced relative to the script's directory so the pair can
    be moved together.
    """

    def __init__(self, data_path: str | Path, script_path: str | Path, title: str) -> None:
        self.data_path = Path(data_path)
        self.script_path = Path(script_path)
        self.title = title
        self.output_png = self.script_path.with_suffix(".png").name

    def _relative_data_path(self) -> str:
        start = self.script_path.resolve().parent
        return Path(os.path.relpath(self.data_path.resolve(), start)).as_posix()

    def _create_header(self) -> str:
        return "\n".join([
            f"# {self.title}",
            f"# data: {self._relative_data_path()}",
            "set datafile separator ','",
            "set terminal pngcairo size 900,650",
            f"set output '{self.output_png}'",
            f"set title \"{self.title}\"",
            "set key top right",
            "set grid",
            "",
        ])

    def create_line_plot(self, with_exact: bool = False) -> StringIO:
        """u(x) from columns x,u; overlays the u_exact column when present."""
        buffer = StringIO()
        buffer.write(self._create_header())
        buffer.write("set xlabel 'x'\nset ylabel 'u'\n")
        data = self._relative_data_path()
        command = f"plot '{data}' using 1:2 skip 1 with linespoints title 'numerical'"
        if with_exact:
            command += f", \\\n     '{data}' using 1:3 skip 1 with lines dashtype 2 title 'analytic'"
        buffer.write(command + "\n")
        buffer.seek(0)
        return buffer

    def create_surface_plot(self) -> StringIO:
        """splot of an x,y,u table written with blank lines between y-blocks."""
        buffer = StringIO()
        buffer.write(self._create_header())
        buffer.write("\n".join([
            "set xlabel 'x'",
            "set ylabel 'y'",
            "set zlabel 'u'",
            "set view 60,30",
            "set pm3d",
            "set hidden3d",
            "",
        ]))
        data = self._relative_data_path()
        buffer.write(f"splot '{data}' using 1:2:3 skip 1 with pm3d title 'u(x,y)'\n")
        buffer.seek(0)
        return buffer

    def write(self, buffer: StringIO) -> Path:
        self.script_path.parent.mkdir(parents=True, exist_ok=True)
        self.script_path.write_text(buffer.getvalue())
        logger.info("Gnuplot script written to %s", self.script_path)
        return self.script_path
