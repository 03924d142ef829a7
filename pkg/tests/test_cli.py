import json

import pytest
from ansible.errors import AnsibleOptionsError
from ansible.release import __version__ as ansible_version

from twintree import __prog__, __version__
from twintree.cli import TwinTreeCLI, run_command
from tests import fixture


def with_fixtures(args):
    return [fixture(arg) if arg.endswith(".tree") else arg for arg in args]


def json_document(out: str) -> dict:
    """
    The JSON document printed last. Every document starts with its first sorted key.
    :param out:
    :return:
    """
    return json.loads(out[out.index('{\n  "failure_depth"') :])


def unwrapped(err: str) -> str:
    """
    The Display messages of stderr on one line, Display wraps long warnings and errors
    :param err:
    :return:
    """
    return " ".join(err.split())


@pytest.mark.parametrize("help_option", ["-h", "--help"])
def test_cli_help(help_option, capfd):
    """
    Test for the help option : -h, --help
    :param help_option:
    :param capfd:
    :return:
    """
    cli = TwinTreeCLI([__prog__, help_option])

    with pytest.raises(SystemExit):
        cli.parse()

    out, err = capfd.readouterr()

    assert "Decide isomorphism, embedding and twinning" in out
    assert "classify" in out


def test_cli_version(capfd):
    """
    Test version printing
    :return:
    """
    cli = TwinTreeCLI([__prog__, "--version"])
    with pytest.raises(SystemExit):
        cli.parse()

    out, err = capfd.readouterr()
    assert out == f"{__prog__} {__version__} (with ansible {ansible_version})\n"


@pytest.mark.parametrize("twintree_cli", [["iso", "cat.tree", "ray.tree"]], indirect=True)
def test_cli_defaults(twintree_cli: TwinTreeCLI):
    """
    Test the default values of the common options
    :param twintree_cli:
    :return:
    """
    options = twintree_cli.options
    assert options.action == "iso"
    assert options.documents == [fixture("cat.tree"), fixture("ray.tree")]
    assert options.unrooted is False
    assert options.json is False
    assert options.depth == 8
    assert options.bound == 4
    assert options.verbosity == 0


@pytest.mark.parametrize(
    "twintree_cli, option, expected",
    [
        (["twin", "cat.tree", "ray.tree"], "rooted", False),
        (["twin", "--rooted", "cat.tree", "ray.tree"], "rooted", True),
        (["embed", "--unrooted", "--bound", "2", "cat.tree", "ray.tree"], "bound", 2),
        (["truncate", "--depth", "3", "cat.tree"], "depth", 3),
        (["classify", "--json", "-vv", "cat.tree"], "verbosity", 2),
        (["reroot", "cat.tree", "S:0/L:0"], "address", "S:0/L:0"),
    ],
    indirect=["twintree_cli"],
    ids=["twin-default", "twin-rooted", "embed-bound", "truncate-depth", "verbosity", "reroot-address"],
)
def test_cli_options(twintree_cli: TwinTreeCLI, option, expected):
    """
    Test the options of the commands
    :return:
    """
    assert getattr(twintree_cli.options, option) == expected


@pytest.mark.parametrize(
    "twintree_cli, expected",
    [
        (["family", "tooth"], ["1", "10", "100"]),
        (["family", "tooth", "--pattern", "1", "--pattern", "0:1"], ["1", "0:1"]),
        (["family", "caterpillar"], None),
    ],
    indirect=["twintree_cli"],
    ids=["default-patterns", "patterns", "no-pattern"],
)
def test_cli_family_patterns(twintree_cli: TwinTreeCLI, expected):
    """
    The tooth family gets three patterns when none is given
    :return:
    """
    assert twintree_cli.options.patterns == expected


@pytest.mark.parametrize(
    "twintree_cli",
    [["check", "iso-oracle", "--cases", "5", "--bound", "2", "--max-n", "4", "--timing"]],
    indirect=True,
)
def test_cli_check_options(twintree_cli: TwinTreeCLI):
    options = twintree_cli.options
    assert options.suite == "iso-oracle"
    assert (options.cases, options.check_bound, options.max_n) == (5, 2, 4)
    assert options.timing is True


def test_cli_seed_from_environment(monkeypatch):
    """
    The default seed comes from TWINTREE_SEED
    :return:
    """
    monkeypatch.setenv("TWINTREE_SEED", "42")
    cli = TwinTreeCLI([__prog__, "check", "lemma6"])
    cli.parse()
    assert cli.options.seed == "42"


def test_cli_negative_depth():
    cli = TwinTreeCLI([__prog__, "truncate", "--depth", "-1", fixture("cat.tree")])
    with pytest.raises(AnsibleOptionsError, match="The depth must be >= 0"):
        cli.parse()


@pytest.mark.parametrize(
    "args, exit_code, expected",
    [
        (["iso", "cat.tree", "cat.tree"], 0, "iso 'cat' 'cat': yes"),
        (["iso", "omega.tree", "omega_leaf.tree"], 1, "iso 'omega' 'omega_leaf': no (failure depth 2)"),
        (["twin", "--rooted", "omega.tree", "omega_leaf.tree"], 0, "twin 'omega' 'omega_leaf': yes"),
        (["embed", "cat.tree", "cat_minus2.tree"], 1, "embed 'cat' 'cat_minus2': no (failure depth 1)"),
        (["twin", "cat.tree", "cat_minus2.tree"], 0, "twin-unrooted 'cat' 'cat_minus2': yes"),
        (["twin", "--bound", "0", "cat.tree", "cat_minus2.tree"], 2, "twin-unrooted 'cat' 'cat_minus2': unknown"),
        (["iso", "--unrooted", "cat.tree", "cat_minus2.tree"], 0, "rooted isomorphism at C1:0"),
        (["iso", "p3.tree", "p3_center.tree"], 1, "iso 'p3' 'p3_center': no"),
        (["iso", "--unrooted", "p3.tree", "p3_center.tree"], 0, "iso-unrooted 'p3' 'p3_center': yes"),
        (["embed", "--unrooted", "cat.tree", "ray.tree"], 1, "contains a comb"),
        (["localiso", "--depth", "3", "cat.tree", "cat_minus2.tree"], 1, "differ at depth 1"),
        (["localiso", "--depth", "3", "binary.tree", "binary.tree"], 0, "agree up to depth 3"),
        (["oracle", "--depth", "4", "cat_minus2.tree", "cat.tree"], 0, "at depth 4: yes"),
        (["oracle", "--depth", "4", "binary.tree", "cat.tree"], 1, "at depth 4: no"),
    ],
    ids=[
        "iso-yes",
        "iso-no",
        "twin-rooted",
        "embed-no",
        "twin-unrooted",
        "twin-unknown",
        "iso-unrooted",
        "rooted-paths",
        "unrooted-paths",
        "embed-refuted",
        "localiso-differ",
        "localiso-agree",
        "oracle-yes",
        "oracle-no",
    ],
)
def test_cli_verdicts(args, exit_code, expected, capfd):
    """
    Test the exit code and the summary line of the decision commands
    :return:
    """
    assert run_command(with_fixtures(args)) == exit_code

    out, err = capfd.readouterr()
    assert expected in out


def test_cli_classify(capfd):
    assert run_command(with_fixtures(["classify", "cat.tree"])) == 0

    out, err = capfd.readouterr()
    assert "contains_comb: true" in out
    assert "nearly_finite: false" in out
    assert "comb: branching state S on S" in out


def test_cli_truncate(capfd):
    """
    The truncation is printed as a .tree document
    :return:
    """
    assert run_command(with_fixtures(["truncate", "--depth", "2", "ray.tree"])) == 0

    out, err = capfd.readouterr()
    assert "scheme ray_2 {\n  root R_2;\n  R_0 -> [];\n  R_1 -> [R_0];\n  R_2 -> [R_1];\n}\n" in out


def test_cli_reroot(capfd):
    assert run_command(with_fixtures(["reroot", "cat.tree", "S:0"])) == 0

    out, err = capfd.readouterr()
    assert "scheme cat_at {\n  root at_S;\n" in out
    assert "  at_S -> [L, S, up0_S];\n" in out


def test_cli_unrooted_tree(capfd):
    """
    A tree document without root is rooted at the vertex 0, with a warning
    :return:
    """
    assert run_command(with_fixtures(["iso", "free_p3.tree", "p3.tree"])) == 0

    out, err = capfd.readouterr()
    assert "has no root, rooting it at the vertex 0" in unwrapped(err)
    assert "iso 'free_p3' 'p3': yes" in out


@pytest.mark.parametrize(
    "args, expected",
    [
        (["classify", "syntax_error.tree"], "line 3"),
        (["classify", "undeclared.tree"], "The state 'B' is not defined"),
        (["classify", "unreachable.tree"], "not reachable"),
        (["classify", "missing.tree"], "Unable to read"),
        (["reroot", "cat.tree", "X:0"], "has no child 'X'"),
        (["reroot", "cat.tree", "S"], "Invalid address step 'S'"),
    ],
    ids=["syntax", "undeclared", "unreachable", "missing-file", "unknown-child", "bad-address"],
)
def test_cli_errors(args, expected, capfd):
    """
    Parse, validation and usage errors exit with 3
    :return:
    """
    assert run_command(with_fixtures(args)) == 3

    out, err = capfd.readouterr()
    assert expected in unwrapped(err)


@pytest.mark.parametrize(
    "args",
    [[], ["iso", "cat.tree"], ["unknown"], ["check", "lemma8"], ["family", "tooth", "--pattern", "00"]],
    ids=["no-command", "one-document", "unknown-command", "unknown-suite", "bad-pattern"],
)
def test_cli_usage_errors(args):
    assert run_command(with_fixtures(args)) == 3


def test_cli_help_exit_code():
    assert run_command(["--help"]) == 0


def test_cli_json(capfd):
    """
    With --json, the certificate is printed as a JSON document
    :return:
    """
    assert run_command(with_fixtures(["iso", "--json", "omega.tree", "omega_leaf.tree"])) == 1

    out, err = capfd.readouterr()
    document = json_document(out)
    assert document["kind"] == "iso"
    assert document["verdict"] == "no"
    assert document["failure_depth"] == 2
    assert [i["name"] for i in document["inputs"]] == ["omega", "omega_leaf"]


def test_cli_json_localiso(capfd):
    assert run_command(with_fixtures(["localiso", "--json", "--depth", "2", "cat.tree", "cat_minus2.tree"])) == 1

    out, err = capfd.readouterr()
    document = json_document(out)
    assert document["kind"] == "localiso"
    assert document["failure_depth"] == 1
    assert document["witness"] == {"depth": 2}


def test_cli_family(capfd):
    """
    Test the summary of a family
    :return:
    """
    assert run_command(["family", "caterpillar", "--max-n", "2"]) == 0

    out, err = capfd.readouterr()
    assert "caterpillar-family: caterpillar_minus_0, caterpillar_minus_1" in out
    assert "caterpillar_minus_0 / caterpillar_minus_1: twin yes, iso no (failure depth 1)" in out


def test_cli_family_json(capfd):
    assert run_command(["family", "sandwich", "--max-n", "2", "--json"]) == 0

    out, err = capfd.readouterr()
    document = json_document(out)
    assert document["kind"] == "family"
    assert document["witness"]["family"] == "sandwich-family"
    assert len(document["witness"]["failure_depths"]) == 1


def test_cli_check(capfd):
    """
    Test the report of a check suite
    :return:
    """
    assert run_command(["check", "lemma7-example", "--max-n", "3"]) == 0

    out, err = capfd.readouterr()
    assert "lemma7-example: pass, 3 cases, 0 skipped, 0 failures" in out


def test_cli_check_json(capfd):
    assert run_command(["check", "lemma6", "--max-n", "3", "--json", "--seed", "5"]) == 0

    out, err = capfd.readouterr()
    document = json_document(out)
    assert document["verdict"] == "pass"
    assert document["witness"]["seed"] == "5"
    assert "wall_time" not in document["witness"]
