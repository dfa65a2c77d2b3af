version = '0.1.0'

if __name__ == '__main__':
    print(version)