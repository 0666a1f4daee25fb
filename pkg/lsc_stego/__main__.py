from lsc_stego import lscstego

if __name__ == "__main__":
    lscstego.run()
