import subprocess
import sys

from bilinear_kernels.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "bilinear_kernels", "verify", "--kind", "hankel",
         "--n", "5", "--trials", "10", "--seed", "2"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fast_count=9" in proc.stdout and "pass=true" in proc.stdout


class TestVerify:
    def test_toeplitz_example(self, capsys):
        code, out, _ = run(capsys, "verify", "--kind", "toeplitz", "--n", "8",
                           "--trials", "100", "--seed", "42")
        assert code == 0
        assert "fast_count=15" in out and "formula=15" in out

    def test_circulant_order_one(self, capsys):
        code, out, _ = run(capsys, "verify", "--kind", "circulant", "--n", "1")
        assert code == 0 and "fast_count=1" in out

    def test_symmetric_reports_ten(self, capsys):
        code, out, _ = run(capsys, "verify", "--kind", "symmetric", "--n", "4")
        assert code == 0 and "fast_count=10" in out

    def test_missing_kind_is_usage_error(self, capsys):
        code, _, err = run(capsys, "verify")
        assert code == 2 and "kind" in err

    def test_unknown_kind_is_usage_error(self, capsys):
        code, _, err = run(capsys, "verify", "--kind", "wat", "--n", "3")
        assert code == 2

    def test_bad_n_is_usage_error(self, capsys):
        code, _, err = run(capsys, "verify", "--kind", "toeplitz")
        assert code == 2

    def test_multilevel_via_levels(self, capsys):
        code, out, _ = run(capsys, "verify", "--kind", "multilevel",
                           "--levels", "toeplitz:3,toeplitz:2", "--trials", "10")
        assert code == 0 and "fast_count=15" in out

    def test_env_tolerance_override(self, capsys, monkeypatch):
        monkeypatch.setenv("BILINEAR_KERNELS_TOL", "1e-30")
        code, out, _ = run(capsys, "verify", "--kind", "toeplitz", "--n", "6",
                           "--trials", "5")
        assert code == 1 and "pass=false" in out

    def test_f_circulant_flag(self, capsys):
        code, out, _ = run(capsys, "verify", "--kind", "f_circulant", "--n", "4",
                           "--f", "0,1", "--trials", "20")
        assert code == 0 and "fast_count=4" in out


class TestCountTable:
    def test_documented_rows(self, capsys):
        code, out, _ = run(capsys, "count-table", "--max-n", "8")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "structure,n,fast_mults,naive_mults,formula,match"
        assert "skew_symmetric,3,6,6*,6,true" in lines
        assert "tph,1,1,1,1,true" in lines
        assert "bttb,3x2,15,36,15,true" in lines

    def test_deterministic_output(self, capsys):
        _, first, _ = run(capsys, "count-table", "--max-n", "5", "--seed", "3")
        _, second, _ = run(capsys, "count-table", "--max-n", "5", "--seed", "3")
        assert first == second

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "table.csv"
        code, out, _ = run(capsys, "count-table", "--max-n", "3", "--out", str(path))
        assert code == 0 and out == ""
        text = path.read_text()
        assert text.startswith("structure,n,")

    def test_unwritable_out_is_io_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "count-table", "--max-n", "2", "--out",
                           str(tmp_path / "missing" / "t.csv"))
        assert code == 2 and "cannot write" in err


class TestTensor:
    def test_circulant_certification(self, capsys):
        code, out, _ = run(capsys, "tensor", "--kind", "circulant", "--n", "4")
        assert code == 0 and "rank certified = 4" in out

    def test_symmetric_certification(self, capsys):
        code, out, _ = run(capsys, "tensor", "--kind", "symmetric", "--n", "5")
        assert code == 0 and "rank certified = 15" in out

    def test_complex_mul_builder(self, capsys):
        code, out, _ = run(capsys, "tensor", "--builder", "complex_mul")
        assert code == 0 and "flattening_ranks=(2, 2, 2)" in out

    def test_commutator_ottaviani(self, capsys):
        code, out, _ = run(capsys, "tensor", "--builder", "commutator_beta", "--ottaviani")
        assert code == 0 and "border rank >= 5" in out

    def test_tph_reports_bounds_not_certification(self, capsys):
        code, out, _ = run(capsys, "tensor", "--kind", "tph", "--n", "3")
        assert code == 1 and "rank bounds: 8 <= rank <= 9" in out

    def test_needs_kind_or_builder(self, capsys):
        code, _, err = run(capsys, "tensor")
        assert code == 2


class TestStability:
    def test_gauss_value(self, capsys):
        code, out, _ = run(capsys, "stability", "--preset", "gauss")
        assert code == 0
        assert "measure=4.8284271" in out and "verified=true" in out

    def test_usual_value(self, capsys):
        code, out, _ = run(capsys, "stability", "--preset", "usual")
        assert code == 0 and "measure=4.0000000" in out

    def test_cube_value(self, capsys):
        code, out, _ = run(capsys, "stability", "--preset", "cube")
        assert code == 0 and "measure=4.0000000" in out and "verified=true" in out

    def test_unknown_preset(self, capsys):
        code, _, err = run(capsys, "stability", "--preset", "nope")
        assert code == 2


class TestTpp:
    def test_d4_preset(self, capsys):
        code, out, _ = run(capsys, "tpp", "--preset", "d4-222")
        assert code == 0 and "tpp=true" in out

    def test_cyclic_preset(self, capsys):
        code, out, _ = run(capsys, "tpp", "--preset", "cyclic-1n1", "--n", "6")
        assert code == 0 and "tpp=true" in out


class TestSimul:
    def test_variant_f(self, capsys):
        code, out, _ = run(capsys, "simul", "--variant", "f", "--seed", "7")
        assert code == 0 and "count=8" in out and "pass=true" in out

    def test_variant_g_blocked(self, capsys):
        code, out, _ = run(capsys, "simul", "--variant", "g", "--n", "3",
                           "--trials", "20", "--seed", "1")
        assert code == 0 and "count=24" in out

    def test_bad_variant(self, capsys):
        code, _, err = run(capsys, "simul", "--variant", "q")
        assert code == 2
