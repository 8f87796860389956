"""Recompute the sha256 manifest of the bundled data tree."""

from pci.pci_data import data_dir, write_manifest

if __name__ == "__main__":
    print(write_manifest(data_dir()), end="")
