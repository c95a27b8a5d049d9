"""Tests for the terminal message helpers."""
import io

from ksforge import colors


class TestMessages:

    def test_errors_go_to_stderr(self, capsys):
        colors.print_error("bad input")
        captured = capsys.readouterr()

        assert captured.err == "Error: bad input\n"
        assert captured.out == ""

    def test_warning_prefix(self, capsys):
        colors.print_warning("careful")
        assert capsys.readouterr().out == "Warning: careful\n"

    def test_no_color_disables_escapes(self, monkeypatch):
        class Terminal(io.StringIO):
            def isatty(self):
                return True

        stream = Terminal()
        monkeypatch.delenv("NO_COLOR", raising=False)
        assert colors._use_color(stream)

        monkeypatch.setenv("NO_COLOR", "1")
        assert not colors._use_color(stream)

    def test_pipes_are_plain(self, monkeypatch):
        monkeypatch.delenv("NO_COLOR", raising=False)
        assert not colors._use_color(io.StringIO())
