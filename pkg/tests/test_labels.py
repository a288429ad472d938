"""Label CSV reading/writing and validation."""

import pytest

from addrbehavior.errors import ValidationError
from addrbehavior.labels import LABEL_NAMES, LabeledAddress, read_labels, write_labels


def test_label_catalog():
    assert len(LABEL_NAMES) == 13
    assert set(LABEL_NAMES) == set(range(13))
    assert LABEL_NAMES[0] == "blackmail"
    assert LABEL_NAMES[2] == "darknet-market"
    assert LABEL_NAMES[9] == "ponzi-scheme"
    assert LABEL_NAMES[10] == "mining-pool"
    assert LABEL_NAMES[12] == "individual-wallet"


def test_round_trip(tmp_path):
    rows = [
        LabeledAddress("addr1", 0, "SA"),
        LabeledAddress("addr2", 12, "WA"),
        LabeledAddress("addr,3", 5, "SA"),  # comma survives CSV quoting
    ]
    path = tmp_path / "labels.csv"
    write_labels(rows, path)
    assert read_labels(path) == rows


def _write(tmp_path, text):
    path = tmp_path / "labels.csv"
    path.write_text(text, encoding="utf-8")
    return path


def test_header_is_mandatory(tmp_path):
    path = _write(tmp_path, "addr,label,strength\nx,1,SA\n")
    with pytest.raises(ValidationError, match="header"):
        read_labels(path)


def test_field_count_enforced(tmp_path):
    path = _write(tmp_path, "address,label_id,strength\nx,1\n")
    with pytest.raises(ValidationError, match="line 2"):
        read_labels(path)


@pytest.mark.parametrize("label", ["13", "-1", "two", "1.5"])
def test_label_id_range(tmp_path, label):
    path = _write(tmp_path, f"address,label_id,strength\nx,{label},SA\n")
    with pytest.raises(ValidationError):
        read_labels(path)


def test_strength_membership(tmp_path):
    path = _write(tmp_path, "address,label_id,strength\nx,1,MAYBE\n")
    with pytest.raises(ValidationError, match="strength"):
        read_labels(path)


def test_duplicate_address_rejected(tmp_path):
    path = _write(tmp_path, "address,label_id,strength\nx,1,SA\nx,2,WA\n")
    with pytest.raises(ValidationError, match="duplicate"):
        read_labels(path)


def test_empty_address_rejected(tmp_path):
    path = _write(tmp_path, "address,label_id,strength\n,1,SA\n")
    with pytest.raises(ValidationError):
        read_labels(path)


def test_error_names_file_and_line(tmp_path):
    path = _write(tmp_path, "address,label_id,strength\nok,1,SA\nbad,99,SA\n")
    with pytest.raises(ValidationError) as err:
        read_labels(path)
    assert "line 3" in str(err.value)
    assert str(path) in str(err.value)
